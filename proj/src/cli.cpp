#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "freeprob/classical.hpp"
#include "freeprob/freeconv.hpp"
#include "freeprob/harness.hpp"
#include "freeprob/measure_io.hpp"
#include "freeprob/parallel.hpp"
#include "freeprob/transform.hpp"

namespace freeprob {

namespace {

using nlohmann::json;

// "1.5-0.5i", "2i", "-i", "3" ...
Complex parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty complex literal");

    auto parse_part = [](const std::string& p, bool imag_unit) -> double {
        if (imag_unit) {
            if (p.empty() || p == "+") return 1.0;
            if (p == "-") return -1.0;
        }
        std::size_t used = 0;
        const double v = std::stod(p, &used);
        if (used != p.size()) throw std::invalid_argument("bad number '" + p + "'");
        return v;
    };

    if (s.back() == 'i' || s.back() == 'j') {
        const std::string body = s.substr(0, s.size() - 1);
        // split at the last +/- that is not an exponent sign or leading
        for (std::size_t i = body.size(); i-- > 1;) {
            if ((body[i] == '+' || body[i] == '-') &&
                body[i - 1] != 'e' && body[i - 1] != 'E') {
                return {parse_part(body.substr(0, i), false),
                        parse_part(body.substr(i), true)};
            }
        }
        return {0.0, parse_part(body, true)};
    }
    return {parse_part(s, false), 0.0};
}

std::vector<Complex> parse_points(const std::string& list) {
    std::vector<Complex> pts;
    std::string cur;
    for (char c : list) {
        if (c == ',' || c == ';') {
            if (!cur.empty()) pts.push_back(parse_complex(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) pts.push_back(parse_complex(cur));
    if (pts.empty()) throw std::invalid_argument("no evaluation points given");
    return pts;
}

GridSpec parse_grid(const std::string& text) {
    // "lo:hi:n"
    const auto c1 = text.find(':');
    const auto c2 = text.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
        throw std::invalid_argument("grid must be lo:hi:n");
    return GridSpec(std::stod(text.substr(0, c1)), std::stod(text.substr(c1 + 1, c2 - c1 - 1)),
                    std::stoi(text.substr(c2 + 1)));
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << content;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"numerical free probability: transforms, free/classical convolution, "
                 "Levy-Hincin limit laws and triangular-array experiments"};
    app.require_subcommand(1);

    int threads = 0;
    if (const char* env = std::getenv("FREEPROB_THREADS")) threads = std::atoi(env);
    app.add_option("--threads", threads, "cap worker threads (default: all cores)");

    // transform
    auto* t_cmd = app.add_subcommand("transform", "evaluate G, F or phi of a measure");
    std::string t_measure, t_which = "cauchy", t_points, t_out;
    t_cmd->add_option("--measure", t_measure, "measure JSON file")->required();
    t_cmd->add_option("--which", t_which, "cauchy | f | phi")
        ->check(CLI::IsMember({"cauchy", "f", "phi"}));
    t_cmd->add_option("--points", t_points, "comma-separated complex points, e.g. 2i,1+3i")
        ->required();
    t_cmd->add_option("--out", t_out, "output file (default stdout)");

    // freeconv / classical
    auto* fc_cmd = app.add_subcommand("freeconv", "free additive convolution of measures");
    auto* cc_cmd = app.add_subcommand("classical", "classical convolution of measures");
    std::vector<std::string> fc_files, cc_files;
    double fc_shift = 0.0, cc_shift = 0.0;
    std::string fc_grid, cc_grid, fc_out, cc_out;
    fc_cmd->add_option("files", fc_files, "input measure JSON files")->required();
    fc_cmd->add_option("--shift", fc_shift, "translate the result by c");
    fc_cmd->add_option("--grid", fc_grid, "output grid lo:hi:n");
    fc_cmd->add_option("--out", fc_out, "output measure file")->required();
    cc_cmd->add_option("files", cc_files, "input measure JSON files")->required();
    cc_cmd->add_option("--shift", cc_shift, "translate the result by c");
    cc_cmd->add_option("--grid", cc_grid, "output grid lo:hi:n");
    cc_cmd->add_option("--out", cc_out, "output measure file")->required();

    // lh
    auto* lh_cmd = app.add_subcommand("lh", "materialize a Levy-Hincin limit law");
    double lh_gamma = 0.0;
    std::string lh_sigma, lh_law = "free", lh_grid, lh_out;
    lh_cmd->add_option("--gamma", lh_gamma, "drift")->required();
    lh_cmd->add_option("--sigma", lh_sigma, "finite measure JSON file")->required();
    lh_cmd->add_option("--law", lh_law, "free | classical")
        ->check(CLI::IsMember({"free", "classical"}));
    lh_cmd->add_option("--grid", lh_grid, "grid lo:hi:n (default -8:8:2048)");
    lh_cmd->add_option("--out", lh_out, "output measure file")->required();

    // limit
    auto* lim_cmd = app.add_subcommand("limit", "run a triangular-array limit experiment");
    std::string lim_config, lim_csv;
    lim_cmd->add_option("--config", lim_config, "experiment config JSON")->required();
    lim_cmd->add_option("--out-csv", lim_csv, "convergence table output")->required();

    // check
    auto* chk_cmd = app.add_subcommand("check", "run a verification suite");
    std::string chk_suite, chk_config;
    chk_cmd->add_option("--suite", chk_suite, "lemma31 | prop23 | phi-additivity")
        ->required()
        ->check(CLI::IsMember({"lemma31", "prop23", "phi-additivity"}));
    chk_cmd->add_option("--config", chk_config, "optional overrides (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (threads > 0) set_max_threads(threads);

    if (t_cmd->parsed()) {
        const Measure m = load_measure_file(t_measure, true);
        const std::vector<Complex> pts = parse_points(t_points);
        json results = json::array();
        for (Complex z : pts) {
            Complex v;
            if (t_which == "cauchy")
                v = cauchy(m, z);
            else if (t_which == "f")
                v = f_transform(m, z);
            else
                v = voiculescu(m, z);
            results.push_back({{"z", complex_json(z)}, {"value", complex_json(v)}});
        }
        write_output(t_out, json{{"which", t_which}, {"results", results}}.dump(2) + "\n");
        return 0;
    }

    if (fc_cmd->parsed() || cc_cmd->parsed()) {
        const bool free_side = fc_cmd->parsed();
        const auto& files = free_side ? fc_files : cc_files;
        const double shift = free_side ? fc_shift : cc_shift;
        const std::string& grid_text = free_side ? fc_grid : cc_grid;
        const std::string& out = free_side ? fc_out : cc_out;
        std::vector<Measure> ms;
        for (const auto& f : files) ms.push_back(load_measure_file(f, true));
        std::optional<GridSpec> grid;
        if (!grid_text.empty()) grid = parse_grid(grid_text);
        const Measure result = free_side ? free_convolve_many(ms, shift, grid)
                                         : classical_convolve_many(ms, shift, grid);
        save_measure_file(out, result);
        return 0;
    }

    if (lh_cmd->parsed()) {
        GeneratorPair pair{lh_gamma, load_measure_file(lh_sigma, false)};
        const GridSpec grid = lh_grid.empty() ? GridSpec(-8.0, 8.0, 2048) : parse_grid(lh_grid);
        const Measure law = (lh_law == "free") ? materialize_free(pair, grid)
                                               : materialize_classical(pair, grid);
        save_measure_file(lh_out, law);
        return 0;
    }

    if (lim_cmd->parsed()) {
        const ExperimentConfig cfg = load_config_file(lim_config);
        const ConvergenceReport report = run_experiment(cfg);
        write_output(lim_csv, report_to_csv(report));
        for (const RowReport& r : report.rows)
            for (const std::string& note : r.notes)
                std::cerr << "row n=" << r.n << ": " << note << "\n";
        return 0;
    }

    if (chk_cmd->parsed()) {
        CheckResult res;
        if (chk_suite == "lemma31") {
            int n_rows = 100;
            std::uint64_t seed = 20260808;
            if (!chk_config.empty()) {
                std::ifstream in(chk_config);
                if (!in) throw std::invalid_argument("cannot open config file: " + chk_config);
                json j;
                in >> j;
                n_rows = j.value("rows", n_rows);
                seed = j.value("seed", seed);
            }
            res = check_lemma31(n_rows, seed);
        } else if (chk_suite == "prop23") {
            res = check_prop23();
        } else {
            res = check_phi_additivity();
        }
        std::cout << res.detail << "\n" << (res.pass ? "PASS" : "FAIL") << "\n";
        return res.pass ? 0 : 1;
    }

    return 2;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run(argc, argv);
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
}

} // namespace freeprob
