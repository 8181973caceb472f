#include "bcvrank/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bcvrank/rng.hpp"

namespace bcvrank {
namespace harness {

namespace {

const std::set<std::string> kKnownMethods = {"PA",  "ED",  "ER",     "IC1",
                                             "NE",  "BCV", "Oracle", "TrueK"};

void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, n_tasks);
    if (threads <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (scenarios.empty() || sizes.empty() || noise_vars.empty()) {
        throw InvalidInputError("ExperimentConfig: need at least one cell");
    }
    if (methods.empty()) {
        throw InvalidInputError("ExperimentConfig: need at least one method");
    }
    if (reps < 1) {
        throw InvalidInputError("ExperimentConfig: need reps >= 1");
    }
    for (const auto& m : methods) {
        if (!kKnownMethods.count(m)) {
            throw InvalidInputError("ExperimentConfig: unknown method '" + m + "'");
        }
    }
    if (loss_estimator != "esa" && loss_estimator != "svd") {
        throw InvalidInputError("ExperimentConfig: loss_estimator must be esa or svd");
    }
    for (const auto& s : scenarios) s.validate();
    for (const auto& [N, n] : sizes) {
        if (N < 3 || n < 3) {
            throw InvalidInputError("ExperimentConfig: sizes must be at least 3x3");
        }
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ExperimentConfig cfg;
    cfg.scenarios.clear();
    for (const auto& s : j.at("scenarios")) {
        if (s.is_string()) {
            cfg.scenarios.push_back(ScenarioSpec::parse(s.get<std::string>()));
        } else {
            cfg.scenarios.push_back(ScenarioSpec{s.at("strong").get<int>(),
                                                 s.at("useful").get<int>(),
                                                 s.at("harmful").get<int>(),
                                                 s.at("undetectable").get<int>()});
        }
    }
    for (const auto& s : j.at("sizes")) {
        cfg.sizes.emplace_back(s.at(0).get<Index>(), s.at(1).get<Index>());
    }
    if (j.contains("noise_vars")) {
        cfg.noise_vars = j["noise_vars"].get<std::vector<double>>();
    }
    if (j.contains("methods")) {
        cfg.methods = j["methods"].get<std::vector<std::string>>();
    }
    cfg.reps = j.value("reps", 1);
    cfg.master_seed = j.value("master_seed", std::uint64_t{0});
    cfg.threads = j.value("threads", 0);
    cfg.k_grid_max = j.value("k_grid_max", 16);
    cfg.loss_estimator = j.value("loss_estimator", std::string("esa"));
    cfg.timing = j.value("timing", false);
    if (j.contains("bcv")) {
        cfg.bcv_reps = j["bcv"].value("reps", 50);
        if (j["bcv"].contains("kmax") && !j["bcv"]["kmax"].is_null()) {
            cfg.bcv_kmax = j["bcv"]["kmax"].get<int>();
        }
    }
    if (j.contains("selector")) {
        const auto& s = j["selector"];
        cfg.selector.kmax = s.value("kmax", 16);
        cfg.selector.n_perm = s.value("n_perm", 99);
        cfg.selector.pa_quantile = s.value("pa_quantile", 0.95);
        cfg.selector.pa_use_covariance = s.value("pa_use_covariance", false);
        if (s.contains("ed_delta") && !s["ed_delta"].is_null()) {
            cfg.selector.ed_delta = s["ed_delta"].get<double>();
        }
        if (s.contains("er_kmax") && !s["er_kmax"].is_null()) {
            cfg.selector.er_kmax = s["er_kmax"].get<int>();
        }
        cfg.selector.ne_full_scan = s.value("ne_full_scan", false);
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    for (const auto& s : cfg.scenarios) {
        j["scenarios"].push_back({{"strong", s.n_strong},
                                  {"useful", s.n_useful},
                                  {"harmful", s.n_harmful},
                                  {"undetectable", s.n_undetectable}});
    }
    for (const auto& [N, n] : cfg.sizes) j["sizes"].push_back({N, n});
    j["noise_vars"] = cfg.noise_vars;
    j["methods"] = cfg.methods;
    j["reps"] = cfg.reps;
    j["master_seed"] = cfg.master_seed;
    j["threads"] = cfg.threads;
    j["k_grid_max"] = cfg.k_grid_max;
    j["loss_estimator"] = cfg.loss_estimator;
    j["timing"] = cfg.timing;
    j["bcv"] = {{"reps", cfg.bcv_reps}};
    if (cfg.bcv_kmax) j["bcv"]["kmax"] = *cfg.bcv_kmax;
    j["selector"] = {{"kmax", cfg.selector.kmax},
                     {"n_perm", cfg.selector.n_perm},
                     {"pa_quantile", cfg.selector.pa_quantile},
                     {"pa_use_covariance", cfg.selector.pa_use_covariance},
                     {"ne_full_scan", cfg.selector.ne_full_scan}};
    if (cfg.selector.ed_delta) j["selector"]["ed_delta"] = *cfg.selector.ed_delta;
    if (cfg.selector.er_kmax) j["selector"]["er_kmax"] = *cfg.selector.er_kmax;
    return j.dump(2);
}

std::string BenchmarkRecord::csv_header() {
    return "scenario,N,n,var_sigma2,method,replicate,khat,kstar,ree,err_x,wall_ms,seed";
}

std::string BenchmarkRecord::csv_row() const {
    std::ostringstream os;
    os << scenario << ',' << n_vars << ',' << n_obs << ','
       << io::format_double(var_sigma2) << ',' << method << ',' << replicate << ','
       << khat << ',' << kstar << ',' << io::format_double(ree) << ','
       << io::format_double(err_x) << ',' << io::format_double(wall_ms) << ','
       << seed;
    return os.str();
}

namespace {

struct Cell {
    ScenarioSpec scenario;
    Index n_vars;
    Index n_obs;
    NoiseSpec noise;
};

// Rank grid for the loss profile: wide enough to score anything a selector
// can return (and the true rank, for TrueK), capped by the data shape.
std::vector<int> profile_grid(const ExperimentConfig& cfg, const Cell& cell) {
    const int n_min = static_cast<int>(std::min(cell.n_vars, cell.n_obs));
    int top = std::max({cfg.k_grid_max, cfg.selector.kmax, cell.scenario.k0(),
                        cfg.bcv_kmax.value_or(0)});
    top = std::min(top, n_min - 1);
    std::vector<int> ks;
    for (int k = 0; k <= top; ++k) ks.push_back(k);
    return ks;
}

}  // namespace

std::vector<BenchmarkRecord> run_benchmark(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<Cell> cells;
    for (const auto& sc : cfg.scenarios) {
        for (const auto& [N, n] : cfg.sizes) {
            for (double v : cfg.noise_vars) {
                cells.push_back(Cell{sc, N, n, NoiseSpec{v}});
            }
        }
    }

    const int n_methods = static_cast<int>(cfg.methods.size());
    const int n_tasks = static_cast<int>(cells.size()) * cfg.reps;
    std::vector<BenchmarkRecord> records(
        static_cast<size_t>(n_tasks) * static_cast<size_t>(n_methods));

    const bcv::Estimator loss_fit = (cfg.loss_estimator == "svd")
                                        ? bcv::svd_estimator()
                                        : bcv::esa_estimator(3);

    auto run_task = [&](int task) {
        const int cell_idx = task / cfg.reps;
        const int rep = task % cfg.reps;
        const Cell& cell = cells[static_cast<size_t>(cell_idx)];

        const std::uint64_t rep_seed = derive_seed(
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(cell_idx)),
            static_cast<std::uint64_t>(rep));
        const std::uint64_t data_seed = derive_seed(rep_seed, 0);
        const std::uint64_t pa_seed = derive_seed(rep_seed, 1);
        const std::uint64_t bcv_seed = derive_seed(rep_seed, 2);

        BenchmarkRecord base;
        base.scenario = cell.scenario.name();
        base.n_vars = cell.n_vars;
        base.n_obs = cell.n_obs;
        base.var_sigma2 = cell.noise.var_sigma2;
        base.replicate = rep;
        base.seed = data_seed;

        const size_t rec0 = static_cast<size_t>(task) * static_cast<size_t>(n_methods);
        auto emit_failure = [&](const std::string& why) {
            for (int mi = 0; mi < n_methods; ++mi) {
                BenchmarkRecord r = base;
                r.method = cfg.methods[static_cast<size_t>(mi)];
                r.khat = -1;
                r.ree = std::numeric_limits<double>::quiet_NaN();
                r.err_x = std::numeric_limits<double>::quiet_NaN();
                records[rec0 + static_cast<size_t>(mi)] = std::move(r);
            }
            (void)why;
        };

        std::optional<GeneratedDataset> maybe_data;
        try {
            maybe_data = simgen::generate_dataset(data_seed, cell.scenario,
                                                  cell.n_vars, cell.n_obs, cell.noise);
        } catch (const Error&) {
            emit_failure("dataset generation failed");
            return;
        }
        const GeneratedDataset& data = *maybe_data;

        metrics::OracleProfile profile;
        std::optional<SampleSpectrum> spectrum;
        try {
            profile = metrics::oracle_rank(data.y, data.x, loss_fit,
                                           profile_grid(cfg, cell));
        } catch (const Error&) {
            emit_failure("loss profile failed");
            return;
        }

        auto spectrum_ref = [&]() -> const SampleSpectrum& {
            if (!spectrum) spectrum = matops::sample_spectrum(data.y);
            return *spectrum;
        };

        for (int mi = 0; mi < n_methods; ++mi) {
            const std::string& method = cfg.methods[static_cast<size_t>(mi)];
            BenchmarkRecord r = base;
            r.method = method;
            r.kstar = profile.kstar;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                int khat = 0;
                if (method == "PA") {
                    Rng rng = make_rng(pa_seed);
                    khat = selectors::pa_select(data.y, rng, cfg.selector);
                } else if (method == "ED") {
                    khat = selectors::ed_select(spectrum_ref(), cfg.selector);
                } else if (method == "ER") {
                    khat = selectors::er_select(spectrum_ref(), cfg.selector);
                } else if (method == "IC1") {
                    khat = selectors::ic1_select(data.y, cfg.selector);
                } else if (method == "NE") {
                    khat = selectors::ne_select(spectrum_ref(), cfg.selector);
                } else if (method == "BCV") {
                    Rng rng = make_rng(bcv_seed);
                    bcv::BcvOptions opts;
                    opts.reps = cfg.bcv_reps;
                    opts.estimator = loss_fit;
                    std::vector<int> ks = bcv::default_k_grid(
                        cell.n_vars, cell.n_obs, cfg.bcv_kmax.value_or(16));
                    khat = bcv::bcv_select(data.y, ks, rng, opts).khat;
                } else if (method == "Oracle") {
                    khat = profile.kstar;
                } else if (method == "TrueK") {
                    khat = cell.scenario.k0();
                }
                r.khat = khat;
                if (profile.losses.count(khat)) {
                    r.ree = metrics::ree(khat, profile.losses, profile.kstar);
                    r.err_x = profile.losses.at(khat);
                } else {
                    r.ree = std::numeric_limits<double>::quiet_NaN();
                    r.err_x = std::numeric_limits<double>::quiet_NaN();
                }
            } catch (const Error&) {
                r.khat = -1;
                r.ree = std::numeric_limits<double>::quiet_NaN();
                r.err_x = std::numeric_limits<double>::quiet_NaN();
            }
            if (cfg.timing) {
                r.wall_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
            }
            records[rec0 + static_cast<size_t>(mi)] = std::move(r);
        }
    };

    parallel_for(n_tasks, cfg.threads, run_task);
    return records;
}

bool any_cell_fully_failed(const ExperimentConfig& cfg,
                           const std::vector<BenchmarkRecord>& records) {
    std::map<std::tuple<std::string, Index, Index, double, std::string>, std::pair<int, int>>
        tally;
    for (const auto& r : records) {
        auto& [ok, total] =
            tally[{r.scenario, r.n_vars, r.n_obs, r.var_sigma2, r.method}];
        ++total;
        if (r.khat >= 0) ++ok;
    }
    (void)cfg;
    for (const auto& [key, counts] : tally) {
        if (counts.first == 0 && counts.second > 0) return true;
    }
    return false;
}

std::string records_to_csv(const std::vector<BenchmarkRecord>& records) {
    std::ostringstream os;
    os << BenchmarkRecord::csv_header() << '\n';
    for (const auto& r : records) os << r.csv_row() << '\n';
    return os.str();
}

SummaryTables emit_tables(const std::vector<BenchmarkRecord>& records) {
    if (records.empty()) {
        throw InvalidInputError("emit_tables: no records");
    }
    // Group in first-appearance order so output order tracks the run order.
    std::vector<std::tuple<std::string, Index, Index, double, std::string>> order;
    std::map<std::tuple<std::string, Index, Index, double, std::string>,
             std::vector<const BenchmarkRecord*>>
        groups;
    for (const auto& r : records) {
        auto key = std::make_tuple(r.scenario, r.n_vars, r.n_obs, r.var_sigma2, r.method);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&r);
    }

    std::ostringstream sum;
    sum << "scenario,N,n,var_sigma2,method,reps,failures,mean_ree,mean_khat\n";
    for (const auto& key : order) {
        const auto& group = groups.at(key);
        double ree_sum = 0.0, khat_sum = 0.0;
        int ok = 0, failures = 0;
        for (const BenchmarkRecord* r : group) {
            if (r->khat < 0 || std::isnan(r->ree)) {
                ++failures;
                continue;
            }
            ree_sum += r->ree;
            khat_sum += r->khat;
            ++ok;
        }
        const auto& [scen, N, n, var, method] = key;
        sum << scen << ',' << N << ',' << n << ',' << io::format_double(var) << ','
            << method << ',' << group.size() << ',' << failures << ','
            << (ok ? io::format_double(ree_sum / ok) : "nan") << ','
            << (ok ? io::format_double(khat_sum / ok) : "nan") << '\n';
    }

    // Pooled survival curves per method, in first-appearance method order.
    std::vector<std::string> method_order;
    std::map<std::string, std::vector<double>> pooled;
    for (const auto& r : records) {
        auto [it, inserted] = pooled.try_emplace(r.method);
        if (inserted) method_order.push_back(r.method);
        if (r.khat >= 0 && std::isfinite(r.ree)) it->second.push_back(r.ree);
    }
    std::ostringstream surv;
    surv << "method,threshold,proportion\n";
    const std::vector<double> thresholds = metrics::default_survival_thresholds();
    for (const auto& method : method_order) {
        auto [ts, props] = metrics::survival_curve(pooled.at(method), thresholds);
        for (size_t i = 0; i < ts.size(); ++i) {
            surv << method << ',' << io::format_double(ts[i]) << ','
                 << io::format_double(props[i]) << '\n';
        }
    }
    return SummaryTables{sum.str(), surv.str()};
}

RealFitResult fit_real(const std::string& path, std::optional<int> k, bool center,
                       std::uint64_t seed, int bcv_reps) {
    io::LabeledMatrix loaded = io::read_matrix_csv(path);
    Vector offsets = Vector::Zero(loaded.values.rows());
    if (center) {
        offsets = loaded.values.rowwise().mean();
        loaded.values.colwise() -= offsets;
    }
    DataMatrix y(std::move(loaded.values));

    std::optional<BcvCurve> curve;
    int rank;
    if (k) {
        rank = *k;
    } else {
        Rng rng = make_rng(seed);
        bcv::BcvOptions opts;
        opts.reps = bcv_reps;
        curve = bcv::bcv_select(y, bcv::default_k_grid(y.n_vars(), y.n_obs()), rng, opts);
        rank = curve->khat;
    }
    return RealFitResult{esa::esa_fit(y, rank, 3), std::move(curve),
                         std::move(loaded.row_labels), std::move(loaded.col_labels),
                         std::move(offsets)};
}

}  // namespace harness
}  // namespace bcvrank
