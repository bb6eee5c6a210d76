#pragma once

// Shared machinery for solvers of the form "find s(z) in C+ with
// R(z, s) = 0" where the associated Picard map T(z, .) sends C+ into
// {Im >= Im z}: the subordination system of the free convolution and
// the F-equation w + phi(w) = z of a Levy-Hincin pair both fit.
//
// A solver plugs in as a type with
//   Complex picard(Complex z, Complex s) const;                  // T(z, s)
//   std::pair<Complex, Complex> picard_with_deriv(Complex, Complex) const;
//   Complex g_value(Complex z, Complex s) const;  // Cauchy transform at z
// Solutions are continued downward in Im z from a high anchor and warm-
// started across neighboring grid columns; the fixed chunking keeps
// results independent of the thread count.

#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "freeprob/errors.hpp"
#include "freeprob/measure.hpp"
#include "freeprob/parallel.hpp"

namespace freeprob::detail {

inline std::string point_str(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return os.str();
}

struct FixedPointOpts {
    double damping = 0.5;
    int max_iter = 500;
    int picard_burst = 4; // damped steps between Newton stretches
};

// Damped Picard iteration with Newton acceleration on T(s) - s = 0.
// Returns the solution or nullopt if the residual never reaches tol.
template <class Solver>
std::optional<Complex> solve_fixed_point(const Solver& sv, Complex z, Complex seed,
                                         const FixedPointOpts& opts = {}) {
    const double tol = 1e-12 * (1.0 + std::abs(z));
    const double im_floor = 0.25 * z.imag();
    Complex s = seed;
    if (!(s.imag() > 0)) s = z;
    int it = 0;
    while (it < opts.max_iter) {
        // Newton stretch on R(s) = T(s) - s (value and derivative share
        // one evaluation pass); bail out to Picard when it stops helping
        double prev_res = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 12 && it < opts.max_iter; ++k, ++it) {
            const auto [t, tp] = sv.picard_with_deriv(z, s);
            const Complex r = t - s;
            if (std::abs(r) <= tol) return s;
            if (std::abs(r) > prev_res) break;
            prev_res = std::abs(r);
            const Complex dr = tp - 1.0;
            if (std::abs(dr) < 1e-14) break;
            Complex step = r / dr;
            int halvings = 0;
            while ((s - step).imag() < im_floor && halvings++ < 40) step *= 0.5;
            const Complex s_new = s - step;
            if (!(s_new.imag() > 0)) break;
            s = s_new;
        }
        // damped Picard burst to re-globalize
        for (int k = 0; k < opts.picard_burst && it < opts.max_iter; ++k, ++it) {
            const Complex t = sv.picard(z, s);
            if (std::abs(t - s) <= tol) return t;
            s = opts.damping * s + (1.0 - opts.damping) * t;
        }
    }
    const Complex t = sv.picard(z, s);
    if (std::abs(t - s) <= 1e-9 * (1.0 + std::abs(z))) return s; // loose acceptance
    return std::nullopt;
}

// Solve at z by continuing downward in Im z from a high anchor.
template <class Solver>
Complex solve_descending(const Solver& sv, Complex z) {
    const double y0 = z.imag();
    double delta = 8.0;
    Complex s = Complex(z.real(), y0 + delta); // seed = anchor point itself
    for (;;) {
        const Complex zk(z.real(), y0 + delta);
        auto r = solve_fixed_point(sv, zk, s);
        if (!r) {
            throw numeric_error("subordination stall at z = " + point_str(zk));
        }
        s = *r;
        if (delta == 0.0) return s;
        delta = (delta < 1e-4) ? 0.0 : delta * 0.35;
    }
}

// Precomputed Cauchy-transform values of a solver over a grid at two
// evaluation heights (eps and eps/2), with on-demand descent for other
// points (used by the atom refinement of the Stieltjes inversion).
template <class Solver>
class ContinuationField {
public:
    ContinuationField(Solver solver, const GridSpec& grid, double eps)
        : solver_(std::move(solver)), grid_(grid), eps_(eps),
          g_eps_(grid.n_points), g_half_(grid.n_points) {
        const std::size_t n = std::size_t(grid_.n_points);
        parallel_chunks(n, 128, [&](std::size_t b, std::size_t e) {
            std::optional<Complex> warm;
            for (std::size_t j = b; j < e; ++j) {
                const double x = grid_.node(int(j));
                const Complex z1(x, eps_);
                Complex s1;
                if (warm) {
                    auto r = solve_fixed_point(solver_, z1, *warm);
                    s1 = r ? *r : solve_descending(solver_, z1);
                } else {
                    s1 = solve_descending(solver_, z1);
                }
                warm = s1;
                const Complex z2(x, 0.5 * eps_);
                auto r2 = solve_fixed_point(solver_, z2, s1);
                const Complex s2 = r2 ? *r2 : solve_descending(solver_, z2);
                g_eps_[j] = solver_.g_value(z1, s1);
                g_half_[j] = solver_.g_value(z2, s2);
            }
        });
    }

    // CauchyEvaluable view; grid points at the two precomputed heights
    // are served from the arrays, everything else is solved on demand.
    Complex operator()(Complex z) const {
        if (z.imag() == eps_ || z.imag() == 0.5 * eps_) {
            const double u = (z.real() - grid_.lo) / grid_.step();
            const double jr = std::round(u);
            if (std::abs(u - jr) < 1e-12 && jr >= 0 && jr < grid_.n_points) {
                const int j = int(jr);
                if (grid_.node(j) == z.real())
                    return z.imag() == eps_ ? g_eps_[std::size_t(j)] : g_half_[std::size_t(j)];
            }
        }
        const Complex s = solve_descending(solver_, z);
        return solver_.g_value(z, s);
    }

    double eps() const { return eps_; }

private:
    Solver solver_;
    GridSpec grid_;
    double eps_;
    std::vector<Complex> g_eps_, g_half_;
};

} // namespace freeprob::detail
