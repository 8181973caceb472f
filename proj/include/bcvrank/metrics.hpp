#ifndef BCVRANK_METRICS_HPP
#define BCVRANK_METRICS_HPP

#include <functional>
#include <map>
#include <vector>

#include "bcvrank/bcv.hpp"

namespace bcvrank {
namespace metrics {

/// Squared Frobenius recovery loss |Xhat - X|_F^2.
double err_x(const Matrix& xhat, const Matrix& x);

struct OracleProfile {
    std::map<int, double> losses;  // rank -> loss; infeasible ranks absent
    int kstar = 0;                 // argmin, ties toward smaller k
};

/// Loss profile of an estimator over candidate ranks, against the true signal.
/// Ranks where the estimator throws are recorded as infeasible and excluded.
OracleProfile oracle_rank(const DataMatrix& y, const Matrix& x,
                          const bcv::Estimator& estimator, const std::vector<int>& ks);

/// Relative estimation error losses[khat] / losses[kstar] - 1 (infinity if the
/// oracle loss is zero and the chosen loss is not).
double ree(int khat, const std::map<int, double>& losses, int kstar);

/// True prediction error |X - Xhat|_F^2 / (nN) + mean(sigma_i^2).
double true_pe(const Matrix& x, const Matrix& xhat, const DiagonalVariances& sigma);

enum class BaselineKind { Svd, Pca, OracleSvd };

/// Rank-k baseline fits: truncated SVD of raw Y; PCA (one alternation step);
/// or the oracle SVD on Sigma^{-1/2} Y for known Sigma.
FactorFit baseline_estimate(const DataMatrix& y, int k, BaselineKind kind,
                            const DiagonalVariances* sigma_true = nullptr);

struct EarlyStoppingProfile {
    std::vector<int> ms;
    std::vector<double> err_x;  // min over k of the loss at each m; NaN if no k feasible
    int m_opt = 0;
};

/// Oracle estimating error Err_X(m) = min_k |Xhat^m(k) - X|_F^2 over the rank
/// grid, for each step count in ms, plus the best m. Cells hit by variance
/// collapse are skipped.
EarlyStoppingProfile early_stopping_profile(const DataMatrix& y, const Matrix& x,
                                            const std::vector<int>& ks,
                                            const std::vector<int>& ms);

/// Proportion of REE values strictly exceeding each threshold.
std::pair<std::vector<double>, std::vector<double>> survival_curve(
    const std::vector<double>& rees, const std::vector<double>& thresholds);

/// Default threshold grid 0, 0.05, ..., 3.
std::vector<double> default_survival_thresholds();

}  // namespace metrics
}  // namespace bcvrank

#endif  // BCVRANK_METRICS_HPP
