#pragma once

#include <optional>
#include <span>

#include "freeprob/measure.hpp"

namespace freeprob {

/// Sampled characteristic function: values of int e^{itx} dm(x) on a
/// uniform t grid.
struct CharFunction {
    std::vector<double> t_grid;
    std::vector<Complex> values;
};

/// Characteristic function value at one t. Atoms are summed directly,
/// density cells are integrated in closed form (stable for all t).
Complex char_value(const Measure& m, double t);

/// Sampled characteristic function; validates |values| <= 1 + 1e-9 and
/// value 1 at t = 0 when the grid contains it.
CharFunction char_function(const Measure& m, std::span<const double> t_grid);

/// mu_1 * ... * mu_k * delta_c. Purely atomic inputs with at most 64
/// atoms in total convolve exactly atom by atom; atomic inputs on a
/// common lattice invert the product characteristic function over one
/// period (exact masses); everything else goes through a tapered
/// inverse transform onto the grid.
Measure classical_convolve_many(std::span<const Measure> ms, double c,
                                const std::optional<GridSpec>& grid = std::nullopt);

/// Default output grid, mirroring the free-convolution choice.
GridSpec default_classical_grid(std::span<const Measure> ms, double c);

} // namespace freeprob
