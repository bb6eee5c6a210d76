#include "freeprob/arrays.hpp"

#include <algorithm>
#include <cmath>

#include "freeprob/measure_io.hpp"

namespace freeprob {

namespace {

constexpr double kTruncation[] = {-1.0, 1.0};

// a_nk = sum over nodes with |t| < 1 (strict: boundary excluded)
double centering_constant(std::span<const QuadratureNode> nodes) {
    double a = 0.0;
    for (const auto& nd : nodes)
        if (std::abs(nd.t) < 1.0) a += nd.w * nd.t;
    return a;
}

void require_row(const Row& row, const char* who) {
    if (row.measures.empty())
        throw std::invalid_argument(std::string(who) + ": row has no measures");
    for (const Measure& m : row.measures)
        if (!m.is_probability())
            throw std::invalid_argument(std::string(who) + ": row entries must be probability measures");
}

} // namespace

TriangularArray build_array(ArrayKind kind, const ArrayParams& params,
                            std::span<const long> row_ns) {
    TriangularArray arr;
    if (kind == ArrayKind::custom_rows) {
        if (!params.custom)
            throw std::invalid_argument("build_array: custom_rows needs row data");
        return *params.custom;
    }
    for (long n : row_ns) {
        if (n < 1) throw std::invalid_argument("build_array: row index must be >= 1");
        Row row;
        row.n = n;
        row.c = 0.0;
        switch (kind) {
            case ArrayKind::iid_scaled_bernoulli: {
                const double s = 1.0 / std::sqrt(double(n));
                const Measure m = Measure::probability({{-s, 0.5}, {s, 0.5}});
                row.measures.assign(std::size_t(n), m);
                break;
            }
            case ArrayKind::poisson_bernoulli: {
                const double p = params.lambda / double(n);
                if (p < 0.0 || p > 1.0)
                    throw std::invalid_argument("build_array: poisson_bernoulli needs 0 <= lambda/n <= 1");
                const Measure m = Measure::probability({{0.0, 1.0 - p}, {1.0, p}});
                row.measures.assign(std::size_t(n), m);
                break;
            }
            case ArrayKind::iid_scaled_from_measure: {
                if (!params.base)
                    throw std::invalid_argument("build_array: iid_scaled_from_measure needs a base measure");
                const Measure& base = *params.base;
                const Measure m = base.shifted(-base.mean()).dilated(1.0 / std::sqrt(double(n)));
                row.measures.assign(std::size_t(n), m);
                break;
            }
            case ArrayKind::custom_rows:
                break; // handled above
        }
        arr.rows.push_back(std::move(row));
    }
    return arr;
}

TriangularArray build_array(ArrayKind kind, const ArrayParams& params, long N) {
    std::vector<long> ns(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) ns[std::size_t(i)] = i + 1;
    return build_array(kind, params, ns);
}

std::vector<double> is_infinitesimal(const TriangularArray& arr, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("is_infinitesimal: eps must be > 0");
    std::vector<double> out;
    out.reserve(arr.rows.size());
    for (const Row& row : arr.rows) {
        double worst = 0.0;
        for (const Measure& m : row.measures) worst = std::max(worst, m.tail_mass(eps));
        out.push_back(worst);
    }
    return out;
}

RowCentering centering(const Row& row) {
    require_row(row, "centering");
    RowCentering rc;
    rc.a.reserve(row.measures.size());
    rc.centered.reserve(row.measures.size());
    for (const Measure& m : row.measures) {
        const double a = centering_constant(m.quadrature_nodes(kTruncation));
        rc.a.push_back(a);
        rc.centered.push_back(m.shifted(-a));
    }
    return rc;
}

Complex f_nk(const Measure& centered, Complex z) {
    if (!(z.imag() > 0.0)) throw std::domain_error("f_nk: requires Im z > 0");
    Complex acc = 0.0;
    for (const auto& nd : centered.quadrature_nodes())
        acc += nd.w * nd.t * z / (z - nd.t);
    return acc;
}

double b_nk(const Measure& mu, double a, double y) {
    if (!(y >= 1.0)) throw std::invalid_argument("b_nk: requires y >= 1");
    double acc = 0.0;
    for (const auto& nd : mu.quadrature_nodes(kTruncation)) {
        if (std::abs(nd.t) < 1.0) continue;
        const double s = nd.t - a;
        acc += nd.w * (a + s * y * y / (y * y + s * s));
    }
    return acc;
}

Condition3Data condition3(const TriangularArray& arr, std::size_t row_index) {
    if (row_index >= arr.rows.size())
        throw std::invalid_argument("condition3: row index out of range");
    auto row_sigma_gamma = [](const Row& row, bool materialize)
        -> std::pair<std::optional<Measure>, double> {
        const RowCentering rc = centering(row);
        double gamma_n = row.c;
        std::vector<Measure> parts;
        double mass_only = 0.0;
        for (std::size_t k = 0; k < rc.centered.size(); ++k) {
            const Measure& cm = rc.centered[k];
            double term = 0.0;
            for (const auto& nd : cm.quadrature_nodes()) {
                term += nd.w * nd.t / (1.0 + nd.t * nd.t);
                mass_only += nd.w * nd.t * nd.t / (1.0 + nd.t * nd.t);
            }
            gamma_n += rc.a[k] + term;
            if (materialize)
                parts.push_back(reweight(cm, [](double t) { return t * t / (1.0 + t * t); }));
        }
        if (materialize) return {superpose(parts), gamma_n};
        return {std::nullopt, mass_only};
    };

    Condition3Data out;
    auto [sigma, gamma_n] = row_sigma_gamma(arr.rows[row_index], true);
    out.sigma_n = std::move(*sigma);
    out.gamma_n = gamma_n;
    out.L = out.sigma_n.total_mass();
    for (std::size_t i = 0; i < row_index; ++i) {
        auto [ignored, mass] = row_sigma_gamma(arr.rows[i], false);
        out.L = std::max(out.L, mass);
    }
    return out;
}

std::pair<double, double> lemma31_check(const Row& row, double y) {
    require_row(row, "lemma31_check");
    if (!(y >= 1.0)) throw std::invalid_argument("lemma31_check: requires y >= 1");

    // gather per-measure node lists once; the same nodes feed a, f and b
    std::vector<std::vector<QuadratureNode>> nodes;
    nodes.reserve(row.measures.size());
    double max_a = 0.0;
    std::vector<double> as;
    for (const Measure& m : row.measures) {
        nodes.push_back(m.quadrature_nodes(kTruncation));
        as.push_back(centering_constant(nodes.back()));
        max_a = std::max(max_a, std::abs(as.back()));
    }
    const bool second_asserted = max_a <= 0.5;

    double v1 = 0.0, v2 = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double a = as[k];
        double re_f = 0.0, im_f = 0.0, b = 0.0;
        for (const auto& nd : nodes[k]) {
            const double s = nd.t - a;
            const double den = y * y + s * s;
            re_f += nd.w * s * y * y / den;
            im_f -= nd.w * s * s * y / den;
            if (std::abs(nd.t) >= 1.0) b += nd.w * (a + s * y * y / den);
        }
        v1 = std::max(v1, std::abs(re_f - b) - 2.0 * std::abs(im_f));
        if (second_asserted)
            v2 = std::max(v2, std::abs(re_f) - (3.0 + 6.0 * y) * std::abs(im_f));
    }
    return {std::max(0.0, v1), std::max(0.0, v2)};
}

Complex bridge_lhs(const Row& row, Complex z) {
    require_row(row, "bridge_lhs");
    const RowCentering rc = centering(row);
    Complex acc = row.c;
    for (std::size_t k = 0; k < rc.centered.size(); ++k)
        acc += rc.a[k] + f_nk(rc.centered[k], z);
    return acc;
}

Complex bridge_rhs(const Row& row, Complex z) {
    require_row(row, "bridge_rhs");
    const RowCentering rc = centering(row);
    Complex acc = row.c;
    for (std::size_t k = 0; k < rc.centered.size(); ++k) {
        Complex integral = 0.0;
        double gamma_term = 0.0;
        for (const auto& nd : rc.centered[k].quadrature_nodes()) {
            const double w2 = nd.t * nd.t / (1.0 + nd.t * nd.t);
            gamma_term += nd.w * nd.t / (1.0 + nd.t * nd.t);
            integral += nd.w * w2 * (1.0 + nd.t * z) / (z - nd.t);
        }
        acc += rc.a[k] + gamma_term + integral;
    }
    return acc;
}

nlohmann::json array_to_json(const TriangularArray& arr) {
    nlohmann::json rows = nlohmann::json::array();
    for (const Row& r : arr.rows) {
        nlohmann::json jr;
        jr["n"] = r.n;
        jr["c"] = r.c;
        nlohmann::json ms = nlohmann::json::array();
        for (const Measure& m : r.measures) ms.push_back(measure_to_json(m));
        jr["measures"] = std::move(ms);
        rows.push_back(std::move(jr));
    }
    return {{"rows", rows}};
}

TriangularArray array_from_json(const nlohmann::json& j) {
    TriangularArray arr;
    long fallback_n = 1;
    for (const auto& jr : j.at("rows")) {
        Row r;
        r.n = jr.contains("n") ? jr.at("n").get<long>() : fallback_n;
        fallback_n = r.n + 1;
        r.c = jr.value("c", 0.0);
        for (const auto& jm : jr.at("measures"))
            r.measures.push_back(measure_from_json(jm, true));
        arr.rows.push_back(std::move(r));
    }
    return arr;
}

} // namespace freeprob
