#pragma once

// Inverse transforms shared by the classical convolution and the
// classical Levy-Hincin materialization.

#include <functional>
#include <span>

#include "freeprob/measure.hpp"

namespace freeprob::detail {

/// Greatest approximate common divisor of the values (tolerance-aware
/// Euclid). Returns 0 when the values have no usable common spacing.
double approx_gcd(std::span<const double> values, double tol);

/// Recover atom masses of a measure supported on {offset + k*delta,
/// kmin <= k <= kmax} from its characteristic function, by discrete
/// Fourier inversion over one period. Exact for lattice measures when
/// the site count fits the transform size.
Measure invert_char_lattice(const std::function<Complex(double)>& chi, double offset,
                            double delta, long kmin, long kmax);

/// Recover a density on the grid from a characteristic function by a
/// Gaussian-tapered inverse transform (t range paired to the grid step,
/// Nyquist-style). Throws numeric_error on a mass defect beyond 2%.
Measure invert_char_continuous(const std::function<Complex(double)>& chi,
                               const GridSpec& grid, int n_t = 4096);

} // namespace freeprob::detail
