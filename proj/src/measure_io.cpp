#include "freeprob/measure_io.hpp"

#include <cmath>
#include <fstream>

namespace freeprob {

using nlohmann::json;

json measure_to_json(const Measure& m) {
    json j = json::object();
    if (!m.atoms().empty()) {
        json arr = json::array();
        for (const Atom& a : m.atoms())
            arr.push_back({{"x", a.x}, {"w", a.w}});
        j["atoms"] = std::move(arr);
    }
    if (m.density()) {
        const auto& d = *m.density();
        j["density"] = {{"lo", d.lo}, {"hi", d.hi}, {"values", d.values}};
    }
    return j;
}

Measure measure_from_json(const json& j, bool require_probability) {
    if (!j.is_object())
        throw std::invalid_argument("measure: expected a JSON object");
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms"))
            atoms.push_back({a.at("x").get<double>(), a.at("w").get<double>()});
    }
    std::optional<DensityGrid> density;
    if (j.contains("density")) {
        const auto& d = j.at("density");
        DensityGrid g;
        g.lo = d.at("lo").get<double>();
        g.hi = d.at("hi").get<double>();
        g.values = d.at("values").get<std::vector<double>>();
        density = std::move(g);
    }
    Measure m = Measure::finite(std::move(atoms), std::move(density));
    if (require_probability) {
        const double defect = std::abs(m.total_mass() - 1.0);
        if (defect > 1e-6)
            throw std::invalid_argument("measure: total mass " + std::to_string(m.total_mass()) +
                                        " is not 1");
        if (defect > 1e-9) { // renormalize sloppy inputs; exact ones pass through
            std::optional<DensityGrid> d = m.density();
            return Measure::probability(m.atoms(), std::move(d));
        }
    }
    return m;
}

Measure load_measure_file(const std::string& path, bool require_probability) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open measure file: " + path);
    json j;
    in >> j;
    return measure_from_json(j, require_probability);
}

void save_measure_file(const std::string& path, const Measure& m) {
    std::ofstream out(path);
    if (!out)
        throw std::invalid_argument("cannot open output file: " + path);
    out << measure_to_json(m).dump(2) << "\n";
}

json gridspec_to_json(const GridSpec& g) {
    return {{"lo", g.lo}, {"hi", g.hi}, {"n_points", g.n_points}};
}

GridSpec gridspec_from_json(const json& j) {
    return GridSpec(j.at("lo").get<double>(), j.at("hi").get<double>(),
                    j.at("n_points").get<int>());
}

} // namespace freeprob
