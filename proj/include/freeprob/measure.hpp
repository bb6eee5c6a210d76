#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freeprob/errors.hpp"

namespace freeprob {

using Complex = std::complex<double>;

/// Point mass: location and nonnegative weight.
struct Atom {
    double x = 0.0;
    double w = 0.0;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Absolutely continuous part: samples of a density on a uniform grid,
/// interpreted piecewise-linearly between nodes.
struct DensityGrid {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double step() const { return (hi - lo) / double(values.size() - 1); }
    double node(std::size_t i) const { return lo + step() * double(i); }
    double value_at(double x) const;

    friend bool operator==(const DensityGrid&, const DensityGrid&) = default;
};

/// Output grid request: n_points uniformly spaced nodes on [lo, hi].
struct GridSpec {
    double lo = -1.0;
    double hi = 1.0;
    int n_points = 2048;

    GridSpec() = default;
    GridSpec(double lo_, double hi_, int n);

    double step() const { return (hi - lo) / double(n_points - 1); }
    double node(int i) const { return lo + step() * double(i); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// One node of a quadrature rule realizing integration against a Measure:
/// atoms contribute their own (location, mass) node, the density part
/// contributes trapezoid nodes.
struct QuadratureNode {
    double t = 0.0;
    double w = 0.0;
};

/// Finite Borel measure on the line: a finite list of atoms plus an
/// optional piecewise-linear density. Probability measures are
/// normalized at construction; the `finite` constructor relaxes the
/// mass-1 requirement (it is used for the Levy-Hincin generator sigma
/// and for the reweighted row measures sigma_n).
///
/// Values are immutable after construction and safe to share across
/// threads.
class Measure {
public:
    Measure() = default;

    static Measure probability(std::vector<Atom> atoms,
                               std::optional<DensityGrid> density = std::nullopt);
    static Measure finite(std::vector<Atom> atoms,
                          std::optional<DensityGrid> density = std::nullopt);
    static Measure point_mass(double c) { return probability({Atom{c, 1.0}}); }
    static Measure zero() { return finite({}); }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::optional<DensityGrid>& density() const { return density_; }
    double total_mass() const { return total_mass_; }
    bool is_probability() const { return std::abs(total_mass_ - 1.0) <= 1e-9; }
    bool is_zero() const { return atoms_.empty() && !density_; }
    bool purely_atomic() const { return !density_; }
    bool is_point_mass() const { return !density_ && atoms_.size() == 1; }

    /// Right-continuous CDF, in [0, total_mass].
    double cdf(double x) const;
    /// Left limit of the CDF at x.
    double cdf_left(double x) const { return cdf(x) - atom_mass_at(x); }
    double atom_mass_at(double x) const;

    /// Mass of {t : |t| >= eps}.
    double tail_mass(double eps) const;

    /// Atom sum plus trapezoid quadrature of f against the density.
    /// f may return double or Complex; throws numeric_error if f is
    /// non-finite anywhere the measure has mass.
    template <class F>
    auto integrate(F&& f) const;

    /// Trapezoid nodes and weights (atoms included), with density cells
    /// optionally subdivided at the given locations. Restricting a sum
    /// to a subset of these nodes is then exactly consistent with the
    /// full-range sum.
    std::vector<QuadratureNode> quadrature_nodes(std::span<const double> split_at = {}) const;

    /// Translate by a. Masses (and the cached total) are unchanged.
    Measure shifted(double a) const;
    /// Pushforward under t -> s*t, s != 0.
    Measure dilated(double s) const;

    double mean() const;
    double variance() const;

    double support_lo() const;
    double support_hi() const;

    friend bool operator==(const Measure&, const Measure&) = default;

private:
    static Measure make(std::vector<Atom> atoms, std::optional<DensityGrid> density,
                        bool normalize);
    void rebuild_cache();
    double density_integral_up_to(double x) const;

    std::vector<Atom> atoms_;                 // sorted, strictly increasing locations
    std::optional<DensityGrid> density_;
    double total_mass_ = 0.0;
    std::vector<double> density_cum_;         // cumulative trapezoid integral at nodes
    std::vector<double> atom_cum_;            // prefix sums of atom masses
};

/// Sum of finite measures. Densities are added on a common uniform grid
/// (exactly when all grids coincide, by linear resampling otherwise).
Measure superpose(std::span<const Measure> parts);

/// Multiply the measure by a nonnegative weight function: atom masses
/// are reweighted exactly, density values are reweighted at the nodes.
Measure reweight(const Measure& m, const std::function<double(double)>& weight);

/// Levy distance: inf{eps > 0 : F_a(x-eps)-eps <= F_b(x) <= F_a(x+eps)+eps}.
/// Exact for atomic measures, grid-accurate otherwise; defined for any
/// pair of finite measures.
double levy_distance(const Measure& a, const Measure& b);

/// Kolmogorov (sup-CDF) distance.
double kolmogorov_distance(const Measure& a, const Measure& b);

// --- template implementation -------------------------------------------

template <class F>
auto Measure::integrate(F&& f) const {
    using R = decltype(f(0.0));
    auto check = [](R v, double x) {
        bool ok;
        if constexpr (std::is_same_v<R, Complex>)
            ok = std::isfinite(v.real()) && std::isfinite(v.imag());
        else
            ok = std::isfinite(v);
        if (!ok)
            throw numeric_error("integrate: non-finite integrand value at t=" + std::to_string(x));
        return v;
    };
    R acc{};
    for (const Atom& a : atoms_)
        acc += a.w * check(f(a.x), a.x);
    if (density_) {
        const auto& d = *density_;
        const double h = d.step();
        R s{};
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d.values[i] == 0.0) continue;
            const double t = d.node(i);
            const double cw = (i == 0 || i + 1 == d.size()) ? 0.5 : 1.0;
            s += (cw * d.values[i]) * check(f(t), t);
        }
        acc += h * s;
    }
    return acc;
}

} // namespace freeprob
