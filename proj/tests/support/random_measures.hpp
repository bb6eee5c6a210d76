#pragma once

#include <random>

#include "freeprob/measure.hpp"

namespace testutil {

/// Random probability measure for property tests: a few atoms in
/// [-3, 3], optionally plus a smooth density bump.
freeprob::Measure random_measure(std::mt19937_64& rng, bool allow_density = true);

/// Random compactly supported probability measure concentrated near 0.
freeprob::Measure random_small_measure(std::mt19937_64& rng, double spread);

} // namespace testutil
