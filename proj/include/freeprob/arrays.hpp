#pragma once

#include <json.hpp>
#include <optional>
#include <span>

#include "freeprob/measure.hpp"

namespace freeprob {

/// One row of a triangular array: k_n probability measures plus the
/// centering constant c_n. The label n identifies the row in reports.
struct Row {
    long n = 1;
    double c = 0.0;
    std::vector<Measure> measures;
};

struct TriangularArray {
    std::vector<Row> rows;
};

/// Row centering data: a[k] = int_{|t|<1} t dmu_nk and the shifted
/// measures mu-bar_nk = shift(mu_nk, -a[k]).
struct RowCentering {
    std::vector<double> a;
    std::vector<Measure> centered;
};

/// Limit-condition data for one row: the reweighted measure sigma_n, the
/// constant gamma_n, and the running sup L of sigma mass over rows up to
/// this one.
struct Condition3Data {
    Measure sigma_n;
    double gamma_n = 0.0;
    double L = 0.0;
};

enum class ArrayKind {
    iid_scaled_bernoulli,
    poisson_bernoulli,
    iid_scaled_from_measure,
    custom_rows,
};

struct ArrayParams {
    double lambda = 1.0;                    // poisson_bernoulli rate
    std::optional<Measure> base;            // iid_scaled_from_measure source
    std::optional<TriangularArray> custom;  // custom_rows payload
};

/// Instantiate an array for the given row indices. iid_scaled_bernoulli:
/// row n holds n copies of (delta_{-1/sqrt(n)} + delta_{1/sqrt(n)})/2;
/// poisson_bernoulli(lambda): n copies of (1-lambda/n) delta_0 +
/// (lambda/n) delta_1; iid_scaled_from_measure: n copies of the base
/// measure, mean-centered then dilated by 1/sqrt(n).
TriangularArray build_array(ArrayKind kind, const ArrayParams& params,
                            std::span<const long> row_ns);
/// Rows 1..N.
TriangularArray build_array(ArrayKind kind, const ArrayParams& params, long N);

/// Per-row max_k tail_mass(mu_nk, eps).
std::vector<double> is_infinitesimal(const TriangularArray& arr, double eps);

RowCentering centering(const Row& row);

/// f_nk(z) = z^2 [G(z) - 1/z] of a centered measure, evaluated as the
/// quadrature sum of t z/(z-t) so that the row identities below hold to
/// machine precision for sampled densities as well.
Complex f_nk(const Measure& centered, Complex z);

/// b_nk(y): the two tail integrals over the original (uncentered)
/// measure; atoms exactly at |t| = 1 belong to the tail.
double b_nk(const Measure& mu, double a, double y);

Condition3Data condition3(const TriangularArray& arr, std::size_t row_index);

/// Max violation of the two centering inequalities over the row at
/// height y >= 1. The second inequality is only asserted (and its
/// violation only reported) when max_k |a_nk| <= 1/2.
std::pair<double, double> lemma31_check(const Row& row, double y);

/// Both sides of the bridge identity
///   c_n + sum_k [a_nk + f_nk(z)] = gamma_n + int (1+tz)/(z-t) dsigma_n,
/// evaluated on the shared quadrature nodes.
Complex bridge_lhs(const Row& row, Complex z);
Complex bridge_rhs(const Row& row, Complex z);

nlohmann::json array_to_json(const TriangularArray& arr);
TriangularArray array_from_json(const nlohmann::json& j);

} // namespace freeprob
