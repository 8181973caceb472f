#ifndef BCVRANK_SIMGEN_HPP
#define BCVRANK_SIMGEN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bcvrank/esa.hpp"

namespace bcvrank {

enum class FactorCategory { Strong, Useful, Harmful, Undetectable };

const char* to_string(FactorCategory c);

/// Factor counts per strength category. The six presets have eight factors each.
struct ScenarioSpec {
    int n_strong = 0;
    int n_useful = 0;
    int n_harmful = 0;
    int n_undetectable = 0;

    int k0() const { return n_strong + n_useful + n_harmful + n_undetectable; }
    void validate(bool allow_empty = false) const;

    /// Table presets type1..type6.
    static ScenarioSpec preset(int type);
    static ScenarioSpec parse(const std::string& name);
    std::string name() const;  // "type3" for presets, "s/u/h/u" counts otherwise
};

/// Noise dispersion: Var(sigma_i^2) with E(sigma_i^2) = 1. Zero variance means
/// all sigma_i^2 = 1; otherwise inverse-gamma with the implied (alpha, beta).
struct NoiseSpec {
    double var_sigma2 = 1.0;

    double alpha() const;  // 2 + 1/var
    double beta() const;   // 1 + 1/var
    void validate() const;
};

/// A synthetic dataset with full ground truth. The noise matrix E is not
/// stored: it is a deterministic function of `seed` (draw order: sigmas, V,
/// U*, E), and equals Sigma^{-1/2} (Y - X).
struct GeneratedDataset {
    DataMatrix y;
    Matrix x;                  // true signal, sqrt(n) Sigma^{1/2} U D V^T
    DiagonalVariances sigma;   // true noise variances
    Matrix u;                  // N x k0 left frame (nonuniform)
    Matrix v;                  // n x k0 right frame (Haar)
    Vector d;                  // strictly decreasing factor strengths d_i
    std::vector<FactorCategory> categories;
    std::uint64_t seed = 0;

    int k0() const { return static_cast<int>(d.size()); }
};

namespace simgen {

/// The ten (N, n) benchmark sizes, two per aspect ratio in
/// {0.02, 0.2, 1, 5, 50}.
extern const std::array<std::pair<Index, Index>, 10> kPresetSizes;

/// Detection and estimation thresholds scaled by the mean noise variance:
///   mu_F = sigma_bar2 * sqrt(gamma)
///   mu_F* = sigma_bar2 * ((1+gamma)/2 + sqrt(((1+gamma)/2)^2 + 3 gamma))
std::pair<double, double> thresholds(double gamma, double sigma_bar2);

/// Squared-strength ladder d^2, strictly decreasing, ordered strong > useful >
/// harmful > undetectable. Strong: (j+0.5) N. Useful: (j+0.5) mu_F*. Harmful:
/// equally spaced interior points of [mu_F, mu_F*]; undetectable: of [0, mu_F].
/// Throws StrengthCollisionError if categories overlap (tiny N).
std::pair<Vector, std::vector<FactorCategory>> factor_strengths(
    const ScenarioSpec& spec, Index n_vars, double gamma, double sigma_bar2);

/// IID inverse-gamma noise variances (all ones when var_sigma2 = 0).
DiagonalVariances sample_sigmas(Rng& rng, Index n_vars, const NoiseSpec& noise);

struct SignalDraw {
    Matrix x;
    Matrix u;
    Matrix v;
};

/// Draws V and an intermediate frame U* uniformly, takes U as the left frame
/// of Sigma^{-1/2} U* D V^T, and rebuilds X = sqrt(n) Sigma^{1/2} U D V^T with
/// the original D and V. This decouples row signal energy from sigma_i^2 while
/// keeping the singular values of Sigma^{-1/2} X exactly sqrt(n) d_i.
SignalDraw sample_signal(Rng& rng, Index n_vars, Index n_obs, const Vector& d2,
                         const DiagonalVariances& sigma);

/// Full dataset draw: Y = Sigma^{1/2} (sqrt(n) U D V^T + E).
GeneratedDataset generate_dataset(std::uint64_t seed, const ScenarioSpec& spec,
                                  Index n_vars, Index n_obs, const NoiseSpec& noise);

/// Pure-noise dataset (k0 = 0): Y = Sigma^{1/2} E.
GeneratedDataset generate_white_noise(std::uint64_t seed, Index n_vars, Index n_obs,
                                      const NoiseSpec& noise);

}  // namespace simgen
}  // namespace bcvrank

#endif  // BCVRANK_SIMGEN_HPP
