#pragma once

#include <json.hpp>
#include <string>

#include "freeprob/measure.hpp"

namespace freeprob {

/// Serialized form: {"atoms":[{"x":..,"w":..},...],
///                   "density":{"lo":..,"hi":..,"values":[..]}}
/// Either field may be absent.
nlohmann::json measure_to_json(const Measure& m);

/// Parse a measure. When require_probability is set the total mass must
/// be 1 within 1e-6 and the result is normalized exactly.
Measure measure_from_json(const nlohmann::json& j, bool require_probability);

Measure load_measure_file(const std::string& path, bool require_probability);
void save_measure_file(const std::string& path, const Measure& m);

nlohmann::json gridspec_to_json(const GridSpec& g);
GridSpec gridspec_from_json(const nlohmann::json& j);

} // namespace freeprob
