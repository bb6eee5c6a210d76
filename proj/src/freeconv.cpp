#include "freeprob/freeconv.hpp"

#include <algorithm>
#include <cmath>

#include "continuation.hpp"

namespace freeprob {

namespace {

// H_rho(u) = F_rho(u) - u and its derivative; H' = -G'/G^2 - 1.
struct SubordinationSystem {
    Measure mu, nu;

    static Complex h_value(const Measure& m, Complex u) { return 1.0 / cauchy(m, u) - u; }

    static std::pair<Complex, Complex> h_pair(const Measure& m, Complex u) {
        const auto [g, gp] = cauchy_pair(m, u);
        return {1.0 / g - u, -gp / (g * g) - 1.0};
    }

    // omega2 -> z + H_mu(z + H_nu(omega2))
    Complex picard(Complex z, Complex w) const {
        return z + h_value(mu, z + h_value(nu, w));
    }

    std::pair<Complex, Complex> picard_with_deriv(Complex z, Complex w) const {
        const auto [hn, hnp] = h_pair(nu, w);
        const auto [hm, hmp] = h_pair(mu, z + hn);
        return {z + hm, hmp * hnp};
    }

    Complex g_value(Complex z, Complex w) const {
        return cauchy(mu, z + h_value(nu, w)); // omega1 = z + H_nu(omega2)
    }
};

void require_probability(const Measure& m, const char* who) {
    if (!m.is_probability())
        throw std::invalid_argument(std::string(who) + ": requires probability measures");
}

Measure regrid(const Measure& m, const GridSpec& grid) {
    if (!m.density()) return m;
    DensityGrid d;
    d.lo = grid.lo;
    d.hi = grid.hi;
    d.values.resize(std::size_t(grid.n_points));
    for (int i = 0; i < grid.n_points; ++i)
        d.values[std::size_t(i)] = m.density()->value_at(grid.node(i));
    return Measure::probability(m.atoms(), std::move(d));
}

Measure convolve_pair(const Measure& mu, const Measure& nu,
                      const std::optional<GridSpec>& grid);

// balanced reduction of ms[lo, hi)
Measure reduce_range(std::span<const Measure> ms, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return ms[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return convolve_pair(reduce_range(ms, lo, mid), reduce_range(ms, mid, hi), std::nullopt);
}

// k-fold power by binary decomposition (a balanced tree with sharing)
Measure free_power(const Measure& m, std::size_t k) {
    Measure cur = m;
    std::optional<Measure> acc;
    for (;;) {
        if (k & 1) acc = acc ? convolve_pair(*acc, cur, std::nullopt) : cur;
        k >>= 1;
        if (k == 0) break;
        cur = convolve_pair(cur, cur, std::nullopt);
    }
    return *acc;
}

Measure convolve_pair(const Measure& mu, const Measure& nu,
                      const std::optional<GridSpec>& grid) {
    // delta factors translate exactly: phi_{delta_c} = c
    if (nu.is_point_mass()) {
        Measure out = mu.shifted(nu.atoms().front().x);
        return grid ? regrid(out, *grid) : out;
    }
    if (mu.is_point_mass()) return convolve_pair(nu, mu, grid);

    const GridSpec g = grid ? *grid : default_convolution_grid(mu, nu);
    detail::ContinuationField<SubordinationSystem> field(SubordinationSystem{mu, nu}, g, 1e-3);
    return stieltjes_invert([&field](Complex z) { return field(z); }, g, 1e-3);
}

} // namespace

GridSpec default_convolution_grid(const Measure& mu, const Measure& nu) {
    const double lo = mu.support_lo() + nu.support_lo() - 1.0;
    const double hi = mu.support_hi() + nu.support_hi() + 1.0;
    return GridSpec(lo, hi, 2048);
}

SubordinationState subordination_solve(const Measure& mu, const Measure& nu, Complex z) {
    if (!(z.imag() > 0)) throw std::domain_error("subordination_solve: requires Im z > 0");
    SubordinationSystem sys{mu, nu};
    const Complex w2 = detail::solve_descending(sys, z);
    const Complex w1 = z + SubordinationSystem::h_value(nu, w2);
    SubordinationState st;
    st.z = z;
    st.omega1 = w1;
    st.omega2 = w2;
    st.residual = std::abs(sys.picard(z, w2) - w2);
    return st;
}

Measure free_convolve(const Measure& mu, const Measure& nu, const GridSpec& grid) {
    require_probability(mu, "free_convolve");
    require_probability(nu, "free_convolve");
    return convolve_pair(mu, nu, grid);
}

Measure free_convolve(const Measure& mu, const Measure& nu) {
    require_probability(mu, "free_convolve");
    require_probability(nu, "free_convolve");
    return convolve_pair(mu, nu, std::nullopt);
}

Measure free_convolve_many(std::span<const Measure> ms, double c,
                           const std::optional<GridSpec>& grid) {
    if (ms.empty()) throw std::invalid_argument("free_convolve_many: empty list");
    for (const Measure& m : ms) require_probability(m, "free_convolve_many");

    Measure out;
    const bool all_equal =
        std::all_of(ms.begin(), ms.end(), [&](const Measure& m) { return m == ms[0]; });
    if (all_equal)
        out = free_power(ms[0], ms.size());
    else
        out = reduce_range(ms, 0, ms.size());
    if (c != 0.0) out = out.shifted(c);
    return grid ? regrid(out, *grid) : out;
}

double phi_additivity_check(const Measure& mu, const Measure& nu,
                            std::span<const Complex> probes) {
    // the recovered density feeds phi evaluations directly, so resolve
    // it on a finer grid than the convolution default; atomic inputs
    // solve fast and their outputs can carry edge singularities, so
    // they get the finest grid
    GridSpec grid = default_convolution_grid(mu, nu);
    grid.n_points = (mu.purely_atomic() && nu.purely_atomic()) ? 32768 : 8192;
    const Measure out = convolve_pair(mu, nu, grid);
    double worst = 0.0;
    for (Complex w : probes) {
        const Complex lhs = voiculescu(out, w);
        const Complex rhs = voiculescu(mu, w) + voiculescu(nu, w);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

} // namespace freeprob
