#ifndef BCVRANK_HARNESS_HPP
#define BCVRANK_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcvrank/io.hpp"
#include "bcvrank/metrics.hpp"
#include "bcvrank/selectors.hpp"

namespace bcvrank {
namespace harness {

/// Benchmark grid and execution knobs. JSON configs mirror this field for
/// field (see parse_config).
struct ExperimentConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::pair<Index, Index>> sizes;
    std::vector<double> noise_vars = {1.0};
    std::vector<std::string> methods = {"BCV"};
    int reps = 1;
    std::uint64_t master_seed = 0;
    int threads = 0;                    // 0 = hardware concurrency
    int k_grid_max = 16;                // rank grid for the loss profile
    std::string loss_estimator = "esa"; // "esa" (m = 3) or "svd"
    int bcv_reps = 50;
    std::optional<int> bcv_kmax;
    SelectorConfig selector;
    bool timing = false;                // wall_ms stays 0 unless enabled

    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);

/// One replicate x method outcome. khat = -1 marks a failed evaluation.
struct BenchmarkRecord {
    std::string scenario;
    Index n_vars = 0;
    Index n_obs = 0;
    double var_sigma2 = 0.0;
    std::string method;
    int replicate = 0;
    int khat = -1;
    int kstar = 0;
    double ree = 0.0;
    double err_x = 0.0;
    double wall_ms = 0.0;
    std::uint64_t seed = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// Runs every (scenario, size, noise, replicate) cell; deterministic given
/// (config, master_seed) regardless of thread count. Replicate streams are
/// derived as splitmix64 chains over (master_seed, cell index, replicate).
std::vector<BenchmarkRecord> run_benchmark(const ExperimentConfig& cfg);

/// True iff some (cell, method) failed in every replicate.
bool any_cell_fully_failed(const ExperimentConfig& cfg,
                           const std::vector<BenchmarkRecord>& records);

std::string records_to_csv(const std::vector<BenchmarkRecord>& records);

/// Per-cell mean REE / mean khat table plus pooled survival curves per method.
struct SummaryTables {
    std::string summary_csv;
    std::string survival_csv;
};
SummaryTables emit_tables(const std::vector<BenchmarkRecord>& records);

struct RealFitResult {
    FactorFit fit;
    std::optional<BcvCurve> curve;   // present when the rank was selected by BCV
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Vector row_offsets;              // zero unless centering was requested
};

/// Fits a CSV matrix: optional row centering, BCV rank selection when k is
/// absent (200 partition replicates), then the m = 3 alternation fit.
RealFitResult fit_real(const std::string& path, std::optional<int> k, bool center,
                       std::uint64_t seed, int bcv_reps = 200);

}  // namespace harness
}  // namespace bcvrank

#endif  // BCVRANK_HARNESS_HPP
