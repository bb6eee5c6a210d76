#include "freeprob/classical.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "char_inversion.hpp"
#include "freeprob/errors.hpp"

namespace freeprob {

namespace detail {

double approx_gcd(std::span<const double> values, double tol) {
    double g = 0.0;
    for (double v : values) {
        double b = std::abs(v);
        if (b <= tol) continue;
        if (g == 0.0) {
            g = b;
            continue;
        }
        double a = std::max(g, b);
        b = std::min(g, b);
        while (b > tol) {
            double r = std::fmod(a, b);
            if (r > b - tol) r = 0.0; // a is a near-multiple of b
            a = b;
            b = r;
        }
        g = a;
    }
    return g;
}

Measure invert_char_lattice(const std::function<Complex(double)>& chi, double offset,
                            double delta, long kmin, long kmax) {
    const long n_sites = kmax - kmin + 1;
    std::size_t n_t = 512;
    while (n_t < 2 * std::size_t(n_sites)) n_t *= 2;
    const double t_step = 2.0 * M_PI / (delta * double(n_t));

    std::vector<Complex> psi(n_t);
    for (std::size_t j = 0; j < n_t; ++j) {
        const double t = t_step * double(j);
        psi[j] = chi(t) * std::polar(1.0, -t * offset);
    }
    std::vector<Atom> atoms;
    atoms.reserve(std::size_t(n_sites));
    double mass = 0.0;
    for (long k = kmin; k <= kmax; ++k) {
        // m_k = (1/N) sum_j psi_j e^{-2 pi i j k / N}
        const Complex rot = std::polar(1.0, -2.0 * M_PI * double(k) / double(n_t));
        Complex phase = 1.0, acc = 0.0;
        for (std::size_t j = 0; j < n_t; ++j) {
            acc += psi[j] * phase;
            phase *= rot;
            if ((j & 255u) == 255u) // re-anchor the rotation against drift
                phase = std::polar(1.0, -2.0 * M_PI * double(k) * double(j + 1) / double(n_t));
        }
        const double w = acc.real() / double(n_t);
        if (w > 1e-15) {
            atoms.push_back({offset + double(k) * delta, w});
            mass += w;
        }
    }
    if (std::abs(mass - 1.0) > 0.02)
        throw numeric_error("lattice inversion mass defect (recovered mass " +
                            std::to_string(mass) + ")");
    return Measure::probability(std::move(atoms));
}

Measure invert_char_continuous(const std::function<Complex(double)>& chi,
                               const GridSpec& grid, int n_t) {
    const double h = grid.step();
    const double t_max = M_PI / h; // Nyquist pairing with the x grid
    // keep the x-space alias period (n_t * h) beyond twice the grid span
    n_t = std::max(n_t, 2 * grid.n_points);
    const double dt = 2.0 * t_max / double(n_t - 1);

    // Gaussian taper only when chi has not decayed by the cutoff
    // (atomic content); its width 2h keeps the smeared spikes resolvable
    // on the x grid
    double tail = 0.0;
    for (double f : {1.0, 0.97, 0.9})
        tail = std::max({tail, std::abs(chi(f * t_max)), std::abs(chi(-f * t_max))});
    const double s = tail < 1e-8 ? 0.0 : 2.0 * h;

    std::vector<Complex> chi_t(static_cast<std::size_t>(n_t));
    std::vector<double> ts(static_cast<std::size_t>(n_t));
    for (int j = 0; j < n_t; ++j) {
        const double t = -t_max + dt * double(j);
        ts[std::size_t(j)] = t;
        chi_t[std::size_t(j)] = chi(t) * std::exp(-0.5 * (t * s) * (t * s));
    }
    DensityGrid dens;
    dens.lo = grid.lo;
    dens.hi = grid.hi;
    dens.values.resize(std::size_t(grid.n_points));
    for (int k = 0; k < grid.n_points; ++k) {
        const double x = grid.node(k);
        const Complex rot = std::polar(1.0, -dt * x);
        Complex phase = std::polar(1.0, -ts[0] * x);
        Complex acc = 0.0;
        for (int j = 0; j < n_t; ++j) {
            const double w = (j == 0 || j + 1 == n_t) ? 0.5 : 1.0;
            acc += w * chi_t[std::size_t(j)] * phase;
            phase *= rot;
            if ((j & 255) == 255)
                phase = std::polar(1.0, -ts[std::size_t(j + 1)] * x);
        }
        const double v = acc.real() * dt / (2.0 * M_PI);
        dens.values[std::size_t(k)] = (v < 1e-9) ? 0.0 : v;
    }
    Measure raw = Measure::finite({}, std::move(dens));
    const double mass = raw.total_mass();
    if (mass < 0.98)
        throw numeric_error("classical inversion: grid too small (recovered mass " +
                            std::to_string(mass) + ")");
    if (mass > 1.02)
        throw numeric_error("classical inversion mass excess (recovered mass " +
                            std::to_string(mass) + ")");
    std::optional<DensityGrid> d = raw.density();
    return Measure::probability({}, std::move(d));
}

} // namespace detail

Complex char_value(const Measure& m, double t) {
    Complex acc = 0.0;
    for (const Atom& a : m.atoms()) acc += a.w * std::polar(1.0, t * a.x);
    if (m.density()) {
        const auto& d = *m.density();
        const double h = d.step();
        for (std::size_t j = 0; j + 1 < d.size(); ++j) {
            const double vp = d.values[j], vq = d.values[j + 1];
            if (vp == 0.0 && vq == 0.0) continue;
            const double p = d.node(j);
            const double q = (j + 2 == d.size()) ? d.hi : d.node(j + 1);
            const double mid = 0.5 * (p + q), half = 0.5 * (q - p);
            const double vm = 0.5 * (vp + vq);
            const double slope = (vq - vp) / h;
            const double a = t * half;
            // int over the cell of (linear density) e^{itx} dx,
            // centered at mid: vm*S0 + slope*S1 with
            //   S0 = 2 sin(a)/t, S1 = 2i (sin a - a cos a)/t^2
            double s0, s1_im;
            if (std::abs(a) < 1e-4) {
                const double a2 = a * a;
                s0 = 2.0 * half * (1.0 - a2 / 6.0 * (1.0 - a2 / 20.0));
                s1_im = 2.0 * t * half * half * half *
                        (1.0 / 3.0 - a2 / 30.0 + a2 * a2 / 840.0);
            } else {
                s0 = 2.0 * std::sin(a) / t;
                s1_im = 2.0 * (std::sin(a) - a * std::cos(a)) / (t * t);
            }
            acc += std::polar(1.0, t * mid) * Complex(vm * s0, slope * s1_im);
        }
    }
    return acc;
}

CharFunction char_function(const Measure& m, std::span<const double> t_grid) {
    if (!m.is_probability())
        throw std::invalid_argument("char_function: requires a probability measure");
    CharFunction cf;
    cf.t_grid.assign(t_grid.begin(), t_grid.end());
    cf.values.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const Complex v = char_value(m, t_grid[i]);
        if (std::abs(v) > 1.0 + 1e-9)
            throw numeric_error("char_function: |value| exceeds 1 at t = " +
                                std::to_string(t_grid[i]));
        if (t_grid[i] == 0.0 && std::abs(v - 1.0) > 1e-9)
            throw numeric_error("char_function: value at t = 0 is not 1");
        cf.values[i] = v;
    }
    return cf;
}

namespace {

struct DistinctFactor {
    const Measure* m;
    long count;
};

std::vector<DistinctFactor> group_factors(std::span<const Measure> ms) {
    std::vector<DistinctFactor> out;
    for (const Measure& m : ms) {
        bool found = false;
        for (auto& f : out)
            if (*f.m == m) {
                ++f.count;
                found = true;
                break;
            }
        if (!found) out.push_back({&m, 1});
    }
    return out;
}

Complex pow_int(Complex v, long k) {
    Complex acc = 1.0, base = v;
    while (k > 0) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
    }
    return acc;
}

// exact atom-by-atom convolution; returns nullopt if the intermediate
// atom count explodes
std::optional<std::vector<Atom>> exact_atom_convolution(std::span<const Measure> ms) {
    std::vector<Atom> acc = {{0.0, 1.0}};
    for (const Measure& m : ms) {
        std::vector<Atom> next;
        next.reserve(acc.size() * m.atoms().size());
        for (const Atom& a : acc)
            for (const Atom& b : m.atoms()) next.push_back({a.x + b.x, a.w * b.w});
        std::sort(next.begin(), next.end(),
                  [](const Atom& a, const Atom& b) { return a.x < b.x; });
        std::vector<Atom> merged;
        for (const Atom& a : next) {
            if (!merged.empty() && std::abs(a.x - merged.back().x) <= 1e-12 * (1.0 + std::abs(a.x)))
                merged.back().w += a.w;
            else
                merged.push_back(a);
        }
        if (merged.size() > 100000) return std::nullopt;
        acc = std::move(merged);
    }
    return acc;
}

} // namespace

GridSpec default_classical_grid(std::span<const Measure> ms, double c) {
    double lo = c, hi = c;
    for (const Measure& m : ms) {
        lo += m.support_lo();
        hi += m.support_hi();
    }
    return GridSpec(lo - 1.0, hi + 1.0, 2048);
}

Measure classical_convolve_many(std::span<const Measure> ms, double c,
                                const std::optional<GridSpec>& grid) {
    if (ms.empty()) throw std::invalid_argument("classical_convolve_many: empty list");
    for (const Measure& m : ms)
        if (!m.is_probability())
            throw std::invalid_argument("classical_convolve_many: requires probability measures");

    const bool all_atomic =
        std::all_of(ms.begin(), ms.end(), [](const Measure& m) { return m.purely_atomic(); });

    if (all_atomic) {
        std::size_t total_atoms = 0;
        for (const Measure& m : ms) total_atoms += m.atoms().size();

        // pure translation
        if (total_atoms == ms.size()) {
            double x = c;
            for (const Measure& m : ms) x += m.atoms().front().x;
            return Measure::point_mass(x);
        }

        if (total_atoms <= 64) {
            if (auto atoms = exact_atom_convolution(ms)) {
                for (Atom& a : *atoms) a.x += c;
                return Measure::probability(std::move(*atoms));
            }
        }

        // common lattice: invert the product characteristic function
        // over one period
        double maxabs = 1.0;
        std::vector<double> diffs;
        for (const Measure& m : ms) {
            const double base = m.atoms().front().x;
            for (const Atom& a : m.atoms()) {
                diffs.push_back(a.x - base);
                maxabs = std::max(maxabs, std::abs(a.x));
            }
        }
        const double delta = detail::approx_gcd(diffs, 1e-9 * maxabs);
        if (delta > 0.0) {
            double lo = c, hi = c;
            for (const Measure& m : ms) {
                lo += m.atoms().front().x;
                hi += m.atoms().back().x;
            }
            const long n_sites = std::lround((hi - lo) / delta) + 1;
            if (n_sites >= 1 && n_sites <= (1l << 20)) {
                auto factors = group_factors(ms);
                auto chi = [&](double t) {
                    Complex v = 1.0;
                    for (const auto& f : factors) v *= pow_int(char_value(*f.m, t), f.count);
                    return v * std::polar(1.0, t * c);
                };
                return detail::invert_char_lattice(chi, lo, delta, 0, n_sites - 1);
            }
        }
    }

    // continuous path: tapered inverse transform of the product
    const GridSpec g = grid ? *grid : default_classical_grid(ms, c);
    auto factors = group_factors(ms);
    auto chi = [&](double t) {
        Complex v = 1.0;
        for (const auto& f : factors) v *= pow_int(char_value(*f.m, t), f.count);
        return v * std::polar(1.0, t * c);
    };
    return detail::invert_char_continuous(chi, g);
}

} // namespace freeprob
