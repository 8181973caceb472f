#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bcvrank/harness.hpp"
#include "bcvrank/rng.hpp"

namespace fs = std::filesystem;
using namespace bcvrank;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInputError("cannot write '" + path.string() + "'");
    }
    out << text;
}

ScenarioSpec parse_scenario(const std::string& text) {
    if (text.rfind("type", 0) == 0) {
        return ScenarioSpec::parse(text);
    }
    // "strong,useful,harmful,undetectable"
    ScenarioSpec spec;
    if (std::sscanf(text.c_str(), "%d,%d,%d,%d", &spec.n_strong, &spec.n_useful,
                    &spec.n_harmful, &spec.n_undetectable) != 4) {
        throw InvalidInputError("scenario must be type1..type6 or s,u,h,u counts");
    }
    return spec;
}

int cmd_simulate(const std::string& scenario, Index n_vars, Index n_obs, double var,
                 std::uint64_t seed, const std::string& out) {
    ScenarioSpec spec = parse_scenario(scenario);
    NoiseSpec noise{var};
    GeneratedDataset data =
        spec.k0() == 0 ? simgen::generate_white_noise(seed, n_vars, n_obs, noise)
                       : simgen::generate_dataset(seed, spec, n_vars, n_obs, noise);
    fs::path stem(out);
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
    io::write_dataset(stem.string(), data, spec, noise);
    std::cout << "wrote " << stem.string() << ".csv and " << stem.string()
              << ".json (k0 = " << data.k0() << ")\n";
    return 0;
}

int cmd_select(const std::string& path, const std::string& method, std::uint64_t seed,
               bool center, int kmax, int bcv_reps) {
    io::LabeledMatrix loaded = io::read_matrix_csv(path);
    if (center) {
        Vector offsets = loaded.values.rowwise().mean();
        loaded.values.colwise() -= offsets;
    }
    DataMatrix y(std::move(loaded.values));
    SelectorConfig cfg;
    cfg.kmax = std::min<int>(kmax, static_cast<int>(std::min(y.n_vars(), y.n_obs())) - 1);

    int khat = -1;
    if (method == "bcv") {
        Rng rng = make_rng(seed);
        bcv::BcvOptions opts;
        opts.reps = bcv_reps;
        BcvCurve curve = bcv::bcv_select(
            y, bcv::default_k_grid(y.n_vars(), y.n_obs(), cfg.kmax), rng, opts);
        khat = curve.khat;
        std::cout << "k,pe_mean\n";
        for (size_t i = 0; i < curve.ks.size(); ++i) {
            std::cout << curve.ks[i] << ',' << io::format_double(curve.pe_mean(static_cast<Index>(i)))
                      << '\n';
        }
        if (curve.truncated_at) {
            std::cout << "# variance guard fired at k = " << *curve.truncated_at << '\n';
        }
    } else if (method == "pa") {
        Rng rng = make_rng(seed);
        khat = selectors::pa_select(y, rng, cfg);
    } else {
        SampleSpectrum spec = matops::sample_spectrum(y);
        if (method == "ed") {
            khat = selectors::ed_select(spec, cfg);
        } else if (method == "er") {
            khat = selectors::er_select(spec, cfg);
        } else if (method == "ic1") {
            khat = selectors::ic1_select(y, cfg);
        } else if (method == "ne") {
            khat = selectors::ne_select(spec, cfg);
        } else {
            throw InvalidInputError("unknown method '" + method +
                                    "' (pa, ed, er, ic1, ne, bcv)");
        }
        std::cout << "lambda2 head:";
        for (int i = 0; i < std::min<int>(cfg.kmax + 1, static_cast<int>(spec.lambdas.size()));
             ++i) {
            std::cout << ' ' << io::format_double(spec.lambdas(i) * spec.lambdas(i));
        }
        std::cout << '\n';
    }
    std::cout << "method: " << method << "\nkhat: " << khat << '\n';
    return 0;
}

int cmd_fit(const std::string& path, std::optional<int> k, bool center, int reps,
            std::uint64_t seed, const std::string& out) {
    harness::RealFitResult res = harness::fit_real(path, k, center, seed, reps);
    fs::create_directories(out);
    fs::path dir(out);
    io::write_matrix_csv((dir / "xhat.csv").string(), res.fit.xhat, res.row_labels,
                         res.col_labels);
    {
        std::ostringstream ss;
        ss << "var,sigma2\n";
        for (Index i = 0; i < res.fit.sigma2hat.size(); ++i) {
            ss << res.row_labels[static_cast<size_t>(i)] << ','
               << io::format_double(res.fit.sigma2hat.sigma2(i)) << '\n';
        }
        write_file(dir / "sigma2.csv", ss.str());
    }
    if (res.curve) {
        std::ostringstream ss;
        ss << "k,pe_mean\n";
        for (size_t i = 0; i < res.curve->ks.size(); ++i) {
            ss << res.curve->ks[i] << ','
               << io::format_double(res.curve->pe_mean(static_cast<Index>(i))) << '\n';
        }
        write_file(dir / "bcv_curve.csv", ss.str());
    }
    std::cout << "k: " << res.fit.k << "\nwrote " << out << "/xhat.csv, sigma2.csv"
              << (res.curve ? ", bcv_curve.csv" : "") << '\n';
    return 0;
}

int cmd_benchmark(const std::string& config_path, std::optional<std::uint64_t> seed,
                  std::optional<int> threads, bool timing, const std::string& out) {
    harness::ExperimentConfig cfg = harness::parse_config(read_file(config_path));
    if (seed) cfg.master_seed = *seed;
    if (threads) cfg.threads = *threads;
    if (timing) cfg.timing = true;

    std::vector<harness::BenchmarkRecord> records = harness::run_benchmark(cfg);
    harness::SummaryTables tables = harness::emit_tables(records);

    fs::create_directories(out);
    fs::path dir(out);
    write_file(dir / "records.csv", harness::records_to_csv(records));
    write_file(dir / "summary.csv", tables.summary_csv);
    write_file(dir / "survival.csv", tables.survival_csv);
    write_file(dir / "config.json", harness::config_to_json(cfg) + "\n");
    std::cout << "wrote " << out << "/records.csv, summary.csv, survival.csv\n";
    if (harness::any_cell_fully_failed(cfg, records)) {
        std::cerr << "benchmark: at least one cell failed in every replicate\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factor-rank selection: early-stopping alternation, "
                 "bi-cross-validation, baselines, and a simulation benchmark"};
    app.require_subcommand(1);

    // simulate
    std::string scenario = "type1";
    Index n_vars = 100, n_obs = 100;
    double var = 1.0;
    std::uint64_t seed = 0;
    std::string out = "out";
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset (CSV + JSON)");
    sim->add_option("--scenario", scenario, "type1..type6 or strong,useful,harmful,undetectable");
    sim->add_option("--N", n_vars, "number of variables (rows)");
    sim->add_option("--n", n_obs, "number of observations (columns)");
    sim->add_option("--var", var, "Var(sigma_i^2): 0, 1 or 10");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--out", out, "output stem (writes <out>.csv and <out>.json)");

    // select
    std::string in_path, method = "bcv";
    bool center = false;
    int kmax = 16, reps = 0;
    auto* sel = app.add_subcommand("select", "Choose the number of factors for a CSV matrix");
    sel->add_option("--in", in_path, "matrix CSV")->required();
    sel->add_option("--method", method, "pa, ed, er, ic1, ne or bcv");
    sel->add_option("--seed", seed, "seed for pa/bcv");
    sel->add_option("--kmax", kmax, "largest candidate rank");
    sel->add_option("--reps", reps, "BCV partition replicates (default 50)");
    sel->add_flag("--center", center, "subtract row means first");

    // fit
    std::optional<int> k;
    auto* fit = app.add_subcommand("fit", "Fit the signal matrix (BCV rank if --k absent)");
    fit->add_option("--in", in_path, "matrix CSV")->required();
    fit->add_option("--k", k, "rank; chosen by BCV when absent");
    fit->add_option("--reps", reps, "BCV partition replicates (default 200)");
    fit->add_option("--seed", seed, "seed for BCV");
    fit->add_option("--out", out, "output directory");
    fit->add_flag("--center", center, "subtract row means first");

    // benchmark
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads;
    bool timing = false;
    auto* bench = app.add_subcommand("benchmark", "Run a simulation benchmark from a JSON config");
    bench->add_option("--config", config_path, "ExperimentConfig JSON")->required();
    bench->add_option("--seed", seed_override, "override master_seed");
    bench->add_option("--threads", threads, "worker threads (0 = all cores)");
    bench->add_option("--out", out, "output directory");
    bench->add_flag("--timing", timing, "record per-method wall time (breaks byte determinism)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(scenario, n_vars, n_obs, var, seed, out);
        if (sel->parsed()) return cmd_select(in_path, method, seed, center, kmax,
                                             reps > 0 ? reps : 50);
        if (fit->parsed()) return cmd_fit(in_path, k, center, reps > 0 ? reps : 200,
                                          seed, out);
        if (bench->parsed())
            return cmd_benchmark(config_path, seed_override, threads, timing, out);
    } catch (const CsvParseError& e) {
        std::cerr << "error: " << e.what() << " (row " << e.row << ", column " << e.col
                  << ")\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
