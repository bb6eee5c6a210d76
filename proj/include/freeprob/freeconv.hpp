#pragma once

#include <optional>
#include <span>

#include "freeprob/measure.hpp"
#include "freeprob/transform.hpp"

namespace freeprob {

/// Solution of the subordination system at one point: F_mu(omega1) =
/// F_nu(omega2) and omega1 + omega2 - F_mu(omega1) = z, both within the
/// reported residual.
struct SubordinationState {
    Complex z;
    Complex omega1;
    Complex omega2;
    double residual = 0.0;
};

/// Solve the subordination system at z (damped fixed point with Newton
/// acceleration, continued downward from a high anchor).
SubordinationState subordination_solve(const Measure& mu, const Measure& nu, Complex z);

/// mu boxplus nu: the measure with G(z) = G_mu(omega1(z)), recovered on
/// the grid by Stieltjes inversion. Point-mass factors reduce to exact
/// translation.
Measure free_convolve(const Measure& mu, const Measure& nu, const GridSpec& grid);
Measure free_convolve(const Measure& mu, const Measure& nu);

/// n-fold boxplus by balanced binary reduction (power-by-squaring when
/// the factors are identical), then translation by c.
Measure free_convolve_many(std::span<const Measure> ms, double c,
                           const std::optional<GridSpec>& grid = std::nullopt);

/// max over the probes of |phi_{mu boxplus nu} - phi_mu - phi_nu|, with
/// phi of the convolution evaluated on the recovered output measure.
double phi_additivity_check(const Measure& mu, const Measure& nu,
                            std::span<const Complex> probes);

/// Default output grid: 2048 points on [support sums - 1, support sums + 1].
GridSpec default_convolution_grid(const Measure& mu, const Measure& nu);

} // namespace freeprob
