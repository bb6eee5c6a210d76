#pragma once

// Closed-form reference laws and transforms used as test oracles. These
// stay independent of the library's solver paths: densities, CDFs and
// Cauchy transforms come straight from the textbook formulas.

#include <functional>

#include "freeprob/measure.hpp"

namespace oracle {

using freeprob::Complex;
using freeprob::Measure;

/// sqrt(z - r1) * sqrt(z - r2) with principal roots; analytic on C+ for
/// real branch points and asymptotic to z at infinity.
Complex sqrt_prod(Complex z, double r1, double r2);

// --- standard semicircle (variance v, support [-2 sqrt v, 2 sqrt v]) ---
double semicircle_density(double x, double variance = 1.0);
double semicircle_cdf(double x, double variance = 1.0);
Complex semicircle_cauchy(Complex z, double variance = 1.0);
/// Piecewise-linear sampling of the closed-form density.
Measure semicircle_measure(double variance = 1.0, int n_points = 16384);

// --- arcsine law on [-2, 2] (Bernoulli boxplus Bernoulli) ---
double arcsine_density(double x);
double arcsine_cdf(double x);
Complex arcsine_cauchy(Complex z);
/// phi of the arcsine law, w sqrt(1+4/w^2) - w; valid for |w| >= 2.
Complex arcsine_phi(Complex w);
/// phi of the symmetric Bernoulli at +-1; valid for |w| >= 2.
Complex bernoulli_phi(Complex w);

// --- Marchenko-Pastur / free Poisson, rate 1, support (0, 4] ---
double mp1_density(double x);
double mp1_cdf(double x);
Complex mp1_cauchy(Complex z);

// --- Gaussian and Poisson ---
double gaussian_cdf(double x, double variance = 1.0);
Measure gaussian_measure(double variance = 1.0, int n_points = 16384, double half_range = 8.0);
Measure poisson_measure(double lambda, int k_max = 40);

/// Atom comb at the mid-quantiles of a CDF (bisection on [lo, hi]);
/// Levy-resolves the law to about 1/m.
Measure quantile_comb(const std::function<double(double)>& cdf, double lo, double hi, int m);

/// Composite Simpson quadrature (independent of Measure::integrate).
double simpson(const std::function<double(double)>& f, double a, double b, int n = 4096);

} // namespace oracle
