#include "support/closed_forms.hpp"

#include <cmath>

namespace oracle {

using freeprob::Atom;
using freeprob::DensityGrid;

Complex sqrt_prod(Complex z, double r1, double r2) {
    return std::sqrt(z - r1) * std::sqrt(z - r2);
}

double semicircle_density(double x, double variance) {
    const double r2 = 4.0 * variance - x * x;
    return r2 > 0.0 ? std::sqrt(r2) / (2.0 * M_PI * variance) : 0.0;
}

double semicircle_cdf(double x, double variance) {
    const double r = 2.0 * std::sqrt(variance);
    if (x <= -r) return 0.0;
    if (x >= r) return 1.0;
    return 0.5 + (x * std::sqrt(r * r - x * x) + r * r * std::asin(x / r)) /
                     (2.0 * M_PI * variance);
}

Complex semicircle_cauchy(Complex z, double variance) {
    const double r = 2.0 * std::sqrt(variance);
    return (z - sqrt_prod(z, -r, r)) / (2.0 * variance);
}

Measure semicircle_measure(double variance, int n_points) {
    const double r = 2.0 * std::sqrt(variance);
    DensityGrid d;
    d.lo = -r;
    d.hi = r;
    d.values.resize(std::size_t(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double x = -r + (2.0 * r) * double(i) / double(n_points - 1);
        d.values[std::size_t(i)] = semicircle_density(x, variance);
    }
    return Measure::probability({}, std::move(d));
}

double arcsine_density(double x) {
    return std::abs(x) < 2.0 ? 1.0 / (M_PI * std::sqrt(4.0 - x * x)) : 0.0;
}

double arcsine_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + std::asin(0.5 * x) / M_PI;
}

Complex arcsine_cauchy(Complex z) { return 1.0 / sqrt_prod(z, -2.0, 2.0); }

Complex arcsine_phi(Complex w) { return w * std::sqrt(1.0 + 4.0 / (w * w)) - w; }

Complex bernoulli_phi(Complex w) { return 0.5 * arcsine_phi(w); }

double mp1_density(double x) {
    return (x > 0.0 && x < 4.0) ? std::sqrt(x * (4.0 - x)) / (2.0 * M_PI * x) : 0.0;
}

double mp1_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 4.0) return 1.0;
    const double theta = std::acos(1.0 - 0.5 * x);
    return (theta + std::sin(theta)) / M_PI;
}

Complex mp1_cauchy(Complex z) { return (z - sqrt_prod(z, 0.0, 4.0)) / (2.0 * z); }

double gaussian_cdf(double x, double variance) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

Measure gaussian_measure(double variance, int n_points, double half_range) {
    const double r = half_range * std::sqrt(variance);
    DensityGrid d;
    d.lo = -r;
    d.hi = r;
    d.values.resize(std::size_t(n_points));
    const double norm = 1.0 / std::sqrt(2.0 * M_PI * variance);
    for (int i = 0; i < n_points; ++i) {
        const double x = -r + 2.0 * r * double(i) / double(n_points - 1);
        d.values[std::size_t(i)] = norm * std::exp(-0.5 * x * x / variance);
    }
    return Measure::probability({}, std::move(d));
}

Measure poisson_measure(double lambda, int k_max) {
    std::vector<Atom> atoms;
    double w = std::exp(-lambda);
    for (int k = 0; k <= k_max; ++k) {
        atoms.push_back({double(k), w});
        w *= lambda / double(k + 1);
    }
    return Measure::probability(std::move(atoms));
}

Measure quantile_comb(const std::function<double(double)>& cdf, double lo, double hi, int m) {
    std::vector<Atom> atoms;
    atoms.reserve(std::size_t(m));
    for (int i = 0; i < m; ++i) {
        const double p = (double(i) + 0.5) / double(m);
        double a = lo, b = hi;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            (cdf(mid) < p ? a : b) = mid;
        }
        atoms.push_back({0.5 * (a + b), 1.0 / double(m)});
    }
    return Measure::probability(std::move(atoms));
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / double(n);
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + h * double(i)) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace oracle
