#ifndef BCVRANK_SELECTORS_HPP
#define BCVRANK_SELECTORS_HPP

#include <optional>

#include "bcvrank/matops.hpp"

namespace bcvrank {

/// Shared knobs for the baseline rank selectors.
struct SelectorConfig {
    int kmax = 16;                     // candidate ranks 0..kmax
    int n_perm = 99;                   // PA permutation count
    double pa_quantile = 0.95;         // PA retention quantile
    bool pa_use_covariance = false;    // PA on covariance instead of correlation
    std::optional<double> ed_delta;    // fixed ED threshold; calibrated if unset
    std::optional<int> er_kmax;        // ER scan cap; the spectrum-based rule if unset
    bool ne_full_scan = false;         // NE: scan all i < min(N, n), ignoring kmax

    void validate(Index n_vars, Index n_obs) const;
};

namespace selectors {

/// Parallel analysis (permutation variant). Retains factor j while the j-th
/// eigenvalue of the sample correlation matrix exceeds the pa_quantile
/// empirical quantile of the j-th eigenvalues over n_perm row-permuted copies.
int pa_select(const DataMatrix& y, Rng& rng, const SelectorConfig& cfg);

/// Eigenvalue difference rule: max{ i <= kmax : lambda_i^2 - lambda_{i+1}^2 >= delta },
/// 0 if empty. delta is cfg.ed_delta if set, else calibrated by iterated
/// regression of the trailing eigenvalues on (j-1)^{2/3}.
int ed_select(const SampleSpectrum& spec, const SelectorConfig& cfg);

/// Eigenvalue ratio rule: argmax over 0 <= i <= kmax of lambda_i^2 / lambda_{i+1}^2
/// with the mock eigenvalue lambda_0^2 = sum_j lambda_j^2 / log(m). A zero
/// denominator counts as +inf and that i wins.
int er_select(const SampleSpectrum& spec, const SelectorConfig& cfg);

/// Bai-Ng IC1: argmin over 0 <= k <= kmax of log V(k) + k ((n+N)/(nN)) log(nN/(n+N)),
/// V(k) the mean squared residual of the rank-k truncated SVD of Y.
int ic1_select(const DataMatrix& y, const SelectorConfig& cfg);

/// Nadakuditi-Edelman criterion on the sample spectrum.
int ne_select(const SampleSpectrum& spec, const SelectorConfig& cfg);

}  // namespace selectors
}  // namespace bcvrank

#endif  // BCVRANK_SELECTORS_HPP
