#ifndef BCVRANK_BCV_HPP
#define BCVRANK_BCV_HPP

#include <functional>
#include <optional>
#include <vector>

#include "bcvrank/esa.hpp"

namespace bcvrank {

/// One random holdout: held-out row / column index sets plus the held-in
/// fraction rho = (n - n0)(N - N0) / (nN).
struct HoldoutPlan {
    std::vector<Index> rows_out;
    std::vector<Index> cols_out;
    double rho;
};

/// Bi-cross-validation curve: per-replicate, per-rank holdout mean squared
/// prediction errors, their per-rank averages over the replicates that
/// evaluated the rank, and the selected rank.
struct BcvCurve {
    std::vector<int> ks;
    Matrix pe;        // replicates x ranks; NaN where a rank was not evaluated
    Vector pe_mean;   // NaN where a rank was excluded from the argmin
    int khat;
    std::optional<int> truncated_at;  // smallest rank at which the guard fired
};

namespace bcv {

/// Fit procedure slot: anything producing a FactorFit at a requested rank.
using Estimator = std::function<FactorFit(const DataMatrix&, int)>;

/// Default estimator: esa_fit with m = 3.
Estimator esa_estimator(int m = 3);

/// SVD estimator (unit variances), for the homoscedastic variant of BCV.
Estimator svd_estimator();

/// Held-in fraction from the aspect ratio gamma = N/n:
///   bar_gamma = ((gamma^{1/2} + gamma^{-1/2}) / 2)^2
///   sqrt(rho) = sqrt(2) / (sqrt(bar_gamma) + sqrt(bar_gamma + 3))
/// Returns (rho, bar_gamma).
std::pair<double, double> holdout_fraction(double gamma);

/// Held-out block sizes (N0, n0) targeting held-in area rho*N*n with the
/// held-in block as square as possible; both held-out sizes are >= 1 and the
/// held-in sides are >= 2.
std::pair<Index, Index> partition_sizes(Index n_vars, Index n_obs);

/// Uniform without-replacement draw of N0 rows and n0 columns.
HoldoutPlan sample_partition(Rng& rng, Index n_vars, Index n_obs, Index n0_rows,
                             Index n0_cols);

/// Held-out block prediction (MacDuffee form):
///   X00 = Y01 * (Sigma1^{-1/2} X11)^+ * Sigma1^{-1/2} * Y10
/// with the pseudo-inverse from the rank-k SVD of Sigma1^{-1/2} X11.
/// Throws DegenerateFitError if X11's numerical rank is below k.
Matrix predict_heldout(const Matrix& y01, const Matrix& y10, const Matrix& x11hat,
                       const DiagonalVariances& sigma1hat, int k);

/// True iff the geometric mean of the variance estimates is below 1e-6 times
/// the largest: mean_i log10 sigma_i < -6 + log10 max_i sigma_i. A zero entry
/// fires the guard immediately. When true, larger ranks are not evaluated.
bool variance_guard(const Vector& sigma2hat);

struct BcvOptions {
    int reps = 50;
    Estimator estimator;  // defaults to esa_estimator(3)
};

/// Full bi-cross-validation scan over candidate ranks. A rank evaluated in at
/// least half of the replicates keeps its average; otherwise it is excluded
/// from the argmin. Throws NoFeasibleRankError if nothing survives.
BcvCurve bcv_select(const DataMatrix& y, const std::vector<int>& ks, Rng& rng,
                    const BcvOptions& opts = {});

/// Default rank grid 0..min(16, min(N1, n1) - 1) for the given data shape.
std::vector<int> default_k_grid(Index n_vars, Index n_obs, int kmax = 16);

}  // namespace bcv
}  // namespace bcvrank

#endif  // BCVRANK_BCV_HPP
