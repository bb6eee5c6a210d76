#include "freeprob/generators.hpp"

#include <cmath>

#include "char_inversion.hpp"
#include "continuation.hpp"
#include "freeprob/measure_io.hpp"
#include "freeprob/transform.hpp"

namespace freeprob {

namespace {

void require_upper(Complex z, const char* who) {
    if (!(z.imag() > 0.0))
        throw std::domain_error(std::string(who) + ": requires Im z > 0");
}

// per-cell integrals of t^m/(z-t) and t^m/(z-t)^2 over [p, q]
struct CellMoments {
    Complex i0, i1, i2;      // t^m/(z-t)
    Complex j0, j1, j2, j3;  // t^m/(z-t)^2
};

CellMoments cell_moments(Complex z, double p, double q) {
    CellMoments c;
    const Complex zp = z - p, zq = z - q;
    const double dx = q - p;
    const double sq = 0.5 * (q * q - p * p);
    c.i0 = std::log(zp) - std::log(zq);
    c.i1 = z * c.i0 - dx;
    c.i2 = z * c.i1 - sq;
    c.j0 = 1.0 / zq - 1.0 / zp;
    c.j1 = z * c.j0 - c.i0;
    c.j2 = z * z * c.j0 - 2.0 * z * c.i0 + dx;
    c.j3 = z * z * z * c.j0 - 3.0 * z * z * c.i0 + 2.0 * z * dx + sq;
    return c;
}

// (cos a - 1) + i (sin a - a), stable for small a
Complex expm1_linear(double a) {
    const double re = -2.0 * std::sin(0.5 * a) * std::sin(0.5 * a);
    double im;
    if (std::abs(a) < 1e-3) {
        const double a2 = a * a;
        im = -a * a2 / 6.0 * (1.0 - a2 / 20.0 * (1.0 - a2 / 42.0));
    } else {
        im = std::sin(a) - a;
    }
    return {re, im};
}

} // namespace

Complex phi_free(const GeneratorPair& g, Complex z) {
    require_upper(z, "phi_free");
    Complex acc = g.gamma;
    for (const Atom& a : g.sigma.atoms())
        acc += a.w * (1.0 + a.x * z) / (z - a.x);
    if (g.sigma.density()) {
        const auto& d = *g.sigma.density();
        const double h = d.step();
        for (std::size_t j = 0; j + 1 < d.size(); ++j) {
            const double vp = d.values[j], vq = d.values[j + 1];
            if (vp == 0.0 && vq == 0.0) continue;
            const double p = d.node(j);
            const double q = (j + 2 == d.size()) ? d.hi : d.node(j + 1);
            const double b = (vq - vp) / h;
            const double a0 = vp - b * p;
            const CellMoments c = cell_moments(z, p, q);
            // (1+tz)(a0+bt) = a0 + (b + a0 z) t + b z t^2
            acc += a0 * c.i0 + (b + a0 * z) * c.i1 + b * z * c.i2;
        }
    }
    return acc;
}

Complex phi_free_derivative(const GeneratorPair& g, Complex z) {
    require_upper(z, "phi_free_derivative");
    Complex acc = 0.0;
    for (const Atom& a : g.sigma.atoms()) {
        const Complex d = z - a.x;
        acc -= a.w * (1.0 + a.x * a.x) / (d * d);
    }
    if (g.sigma.density()) {
        const auto& d = *g.sigma.density();
        const double h = d.step();
        for (std::size_t j = 0; j + 1 < d.size(); ++j) {
            const double vp = d.values[j], vq = d.values[j + 1];
            if (vp == 0.0 && vq == 0.0) continue;
            const double p = d.node(j);
            const double q = (j + 2 == d.size()) ? d.hi : d.node(j + 1);
            const double b = (vq - vp) / h;
            const double a0 = vp - b * p;
            const CellMoments c = cell_moments(z, p, q);
            // (1+t^2)(a0+bt) = a0 + b t + a0 t^2 + b t^3
            acc -= a0 * c.j0 + b * c.j1 + a0 * c.j2 + b * c.j3;
        }
    }
    return acc;
}

Complex char_exponent_classical(const GeneratorPair& g, double t) {
    // psi(x,t) = [(cos(tx)-1) + i(sin(tx)-tx)] (1+x^2)/x^2 + i t x,
    // read as -t^2/2 at x = 0
    auto psi = [t](double x) -> Complex {
        if (x == 0.0) return {-0.5 * t * t, 0.0};
        const Complex e = expm1_linear(t * x);
        return e * ((1.0 + x * x) / (x * x)) + Complex(0.0, t * x);
    };
    return Complex(0.0, g.gamma * t) + g.sigma.integrate(psi);
}

namespace {

// fixed-point system for the F-transform of the free LH law:
// w = z - phi(w)
struct LevyHincinSystem {
    GeneratorPair pair;
    Complex picard(Complex z, Complex w) const { return z - phi_free(pair, w); }
    std::pair<Complex, Complex> picard_with_deriv(Complex z, Complex w) const {
        return {z - phi_free(pair, w), -phi_free_derivative(pair, w)};
    }
    Complex g_value(Complex /*z*/, Complex w) const { return 1.0 / w; }
};

} // namespace

Measure materialize_free(const GeneratorPair& g, const GridSpec& grid) {
    if (g.sigma.is_zero()) return Measure::point_mass(g.gamma); // phi == gamma
    detail::ContinuationField<LevyHincinSystem> field(LevyHincinSystem{g}, grid, 1e-3);
    return stieltjes_invert([&field](Complex z) { return field(z); }, grid, 1e-3);
}

Measure materialize_classical(const GeneratorPair& g, const GridSpec& grid) {
    if (g.sigma.is_zero()) return Measure::point_mass(g.gamma);

    if (g.sigma.purely_atomic() && g.sigma.atom_mass_at(0.0) == 0.0) {
        // compound Poisson: rates lambda_j = w_j (1+x_j^2)/x_j^2 at jumps
        // x_j, plus drift gamma - sum w_j/x_j
        const auto& atoms = g.sigma.atoms();
        std::vector<double> jumps, rates;
        double drift = g.gamma;
        double maxabs = 1.0;
        for (const Atom& a : atoms) {
            jumps.push_back(a.x);
            rates.push_back(a.w * (1.0 + a.x * a.x) / (a.x * a.x));
            drift -= a.w / a.x;
            maxabs = std::max(maxabs, std::abs(a.x));
        }
        const double delta = detail::approx_gcd(jumps, 1e-9 * maxabs);
        if (delta > 0.0) {
            double span_neg = 0.0, span_pos = 0.0;
            for (std::size_t j = 0; j < jumps.size(); ++j) {
                const double reach =
                    (rates[j] + 12.0 * std::sqrt(rates[j] + 1.0) + 30.0) * std::abs(jumps[j]);
                (jumps[j] < 0 ? span_neg : span_pos) += reach;
            }
            const long kmin = -std::lround(std::ceil(span_neg / delta));
            const long kmax = std::lround(std::ceil(span_pos / delta));
            if (kmax - kmin + 1 <= (1l << 20)) {
                auto chi = [&](double t) {
                    Complex e = 0.0;
                    for (std::size_t j = 0; j < jumps.size(); ++j)
                        e += rates[j] * (std::polar(1.0, t * jumps[j]) - 1.0);
                    return std::exp(e);
                };
                return detail::invert_char_lattice(chi, drift, delta, kmin, kmax);
            }
        }
    }

    auto chi = [&](double t) { return std::exp(char_exponent_classical(g, t)); };
    return detail::invert_char_continuous(chi, grid);
}

nlohmann::json generator_pair_to_json(const GeneratorPair& g) {
    return {{"gamma", g.gamma}, {"sigma", measure_to_json(g.sigma)}};
}

GeneratorPair generator_pair_from_json(const nlohmann::json& j) {
    GeneratorPair g;
    g.gamma = j.at("gamma").get<double>();
    g.sigma = measure_from_json(j.at("sigma"), false);
    return g;
}

} // namespace freeprob
