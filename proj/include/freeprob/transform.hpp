#pragma once

#include <functional>
#include <span>

#include "freeprob/measure.hpp"

namespace freeprob {

/// Truncated cone Gamma_{alpha,beta} = {x+iy : |x| < alpha*y, y > beta}.
struct Cone {
    double alpha = 1.0;
    double beta = 1.0;
    bool contains(Complex z) const {
        return z.imag() > beta && std::abs(z.real()) < alpha * z.imag();
    }
};

/// Evaluator z in C+ -> G(z) in C-, either measure-backed or given by a
/// closed-form / solver-derived formula.
using CauchyEvaluable = std::function<Complex(Complex)>;

/// G_mu(z) = int 1/(z-t) dmu(t). Atoms are summed directly; the
/// piecewise-linear density is integrated in closed form cell by cell,
/// which stays accurate arbitrarily close to the real axis.
Complex cauchy(const Measure& m, Complex z);

/// G_mu'(z) = -int 1/(z-t)^2 dmu(t), same evaluation scheme.
Complex cauchy_derivative(const Measure& m, Complex z);

/// Both at once (they share the per-cell logarithms).
std::pair<Complex, Complex> cauchy_pair(const Measure& m, Complex z);

/// F_mu = 1/G_mu.
Complex f_transform(const Measure& m, Complex z);

/// Measure-backed CauchyEvaluable (shares ownership of a copy of m).
CauchyEvaluable cauchy_evaluable(const Measure& m);

/// Solve F_mu(z) = w by Newton iteration seeded at w, with continuation
/// from i*max(4*beta_hint, 2|w|) toward w when the direct seed fails.
/// Result satisfies |F(z) - w| <= 1e-10 * (1 + |w|).
Complex invert_f(const Measure& m, Complex w, double beta_hint = 1.0);

/// phi_mu(w) = F_mu^{-1}(w) - w.
Complex voiculescu(const Measure& m, Complex w, double beta_hint = 1.0);

/// Smallest beta >= 1 (geometric search, doubling up to a cap) such that
/// a probe set of cone points passes for every measure: Newton converges,
/// the recovered points are pairwise distinct, and Im F^{-1} increases
/// along each probe ray. Probe-based certification, not a proof.
Cone select_cone(std::span<const Measure> ms, double alpha);

/// v with phi_mu(w) = w^2 [G_mu(w) - 1/w] (1 + v).
Complex prop23_residual(const Measure& m, Complex w, double beta_hint = 1.0);

/// Recover the measure behind a Cauchy transform: density from
/// -(1/pi) Im g(x + i*eps) with two-point Richardson extrapolation
/// (eps, eps/2); atoms detected where eps*|g| exceeds atom_threshold and
/// extracted from the -eps*Im g limit. The result is renormalized to
/// mass 1; a recovered mass off by more than 2% is an error.
Measure stieltjes_invert(const CauchyEvaluable& g, const GridSpec& grid, double eps,
                         double atom_threshold = 0.1);

} // namespace freeprob
