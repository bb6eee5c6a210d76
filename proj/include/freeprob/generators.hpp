#pragma once

#include <json.hpp>

#include "freeprob/measure.hpp"

namespace freeprob {

/// Levy-Hincin generator pair: a real drift and a finite positive
/// measure, parameterizing both the free and the classical infinitely
/// divisible laws.
struct GeneratorPair {
    double gamma = 0.0;
    Measure sigma = Measure::zero();
};

/// phi(z) = gamma + int (1+tz)/(z-t) dsigma(t); Im phi <= 0 on C+.
/// The atom at t = 0 contributes 1/z.
Complex phi_free(const GeneratorPair& g, Complex z);

/// d/dz phi(z) = -int (1+t^2)/(z-t)^2 dsigma(t).
Complex phi_free_derivative(const GeneratorPair& g, Complex z);

/// i gamma t + int (e^{itx} - 1 - itx/(1+x^2)) (1+x^2)/x^2 dsigma(x),
/// with the integrand read as -t^2/2 at x = 0.
Complex char_exponent_classical(const GeneratorPair& g, double t);

/// The free law nu_boxplus^{gamma,sigma}: solve w + phi(w) = z for
/// w = F(z) pointwise (continued downward in Im z), then invert the
/// resulting Cauchy transform G = 1/w on the grid.
Measure materialize_free(const GeneratorPair& g, const GridSpec& grid);

/// The classical law nu_*^{gamma,sigma}: inverse transform of
/// exp(char_exponent). Purely atomic sigma without mass at 0 produces a
/// (shifted) compound Poisson law; when its jumps live on a lattice the
/// atom masses are recovered exactly.
Measure materialize_classical(const GeneratorPair& g, const GridSpec& grid);

nlohmann::json generator_pair_to_json(const GeneratorPair& g);
GeneratorPair generator_pair_from_json(const nlohmann::json& j);

} // namespace freeprob
