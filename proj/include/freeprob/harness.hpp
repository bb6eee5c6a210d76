#pragma once

#include <json.hpp>
#include <optional>
#include <random>
#include <string>

#include "freeprob/arrays.hpp"
#include "freeprob/generators.hpp"
#include "freeprob/measure.hpp"

namespace freeprob {

enum class Metric { levy, kolmogorov };

/// Full description of a limit experiment: the array to build, the
/// expected limit pair, grids, metric and probe heights.
struct ExperimentConfig {
    ArrayKind kind = ArrayKind::iid_scaled_bernoulli;
    ArrayParams params;
    std::vector<long> row_ns = {4, 16, 64, 256};
    GeneratorPair limit;
    std::optional<GridSpec> law_grid;   // grid for the materialized limit laws
    std::optional<GridSpec> conv_grid;  // override for the convolution outputs
    Metric metric = Metric::levy;
    std::vector<double> probe_ys = {2.0, 5.0, 10.0, 100.0};
    double tail_eps = 0.5;
    bool keep_measures = false;
};

/// Per-row outcome. Sub-computations that fail numerically leave a NaN
/// in their column and an entry in `notes`; the run continues.
struct RowReport {
    long n = 0;
    double free_dist = nan_value();
    double classical_dist = nan_value();
    double sigma_dist = nan_value();
    double gamma_err = nan_value();
    double max_a = nan_value();
    double max_tail = nan_value();
    double max_v = nan_value();
    double lemma31_viol1 = nan_value();
    double lemma31_viol2 = nan_value();
    double lemma32_gap = nan_value();
    std::vector<std::string> notes;
    std::optional<Measure> nu_n;  // kept when keep_measures is set
    std::optional<Measure> mu_n;
    std::optional<Measure> sigma_n;
    double gamma_n = nan_value();

    static double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }
};

struct ConvergenceReport {
    std::vector<RowReport> rows;
};

ConvergenceReport run_experiment(const ExperimentConfig& cfg);

/// CSV with the fixed column order
/// n,free_dist,classical_dist,sigma_dist,gamma_err,max_a,max_tail,max_v,
/// lemma31_viol1,lemma31_viol2,lemma32_gap
std::string report_to_csv(const ConvergenceReport& report);

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

/// A randomly generated infinitesimal row (atoms and bumps near the
/// origin, occasional small tail atom); max_k |a_nk| <= 1/2 by
/// construction.
Row random_infinitesimal_row(std::mt19937_64& rng);

struct CheckResult {
    bool pass = false;
    std::string detail;
};

/// Centering inequalities over seeded random infinitesimal rows at
/// y in {1,2,5,10}.
CheckResult check_lemma31(int n_rows = 100, std::uint64_t seed = 20260808);
/// Transform-residual decay on the scaled-Bernoulli array.
CheckResult check_prop23();
/// phi additivity of the free convolution at fixed cone probes.
CheckResult check_phi_additivity();

/// CLI entry point (subcommands transform / freeconv / classical / lh /
/// limit / check). Exit codes: 0 success, 1 numerical failure, 2 bad
/// input or configuration.
int cli_main(int argc, const char* const* argv);

} // namespace freeprob
