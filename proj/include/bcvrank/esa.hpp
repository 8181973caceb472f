#ifndef BCVRANK_ESA_HPP
#define BCVRANK_ESA_HPP

#include <functional>

#include "bcvrank/matops.hpp"

namespace bcvrank {

/// Per-variable noise variances, diag(sigma_1^2, ..., sigma_N^2).
struct DiagonalVariances {
    Vector sigma2;

    explicit DiagonalVariances(Vector s);
    Index size() const { return sigma2.size(); }
};

/// Result of a rank-k signal fit: estimated signal, estimated noise variances,
/// and the rank / step count that produced them.
struct FactorFit {
    Matrix xhat;
    DiagonalVariances sigma2hat;
    int k;
    int m;
};

namespace esa {

/// Row-wise sample variances (1/n) * diag((Y - Ybar)(Y - Ybar)^T), where Ybar
/// repeats each row mean. Throws DegenerateVarianceError for a constant row.
DiagonalVariances init_sigma(const DataMatrix& y);

/// Early-stopping alternation: starting from init_sigma, m rounds of
///   Xhat  <- Sigma^{1/2} * rank-k truncation of Sigma^{-1/2} Y
///   Sigma <- diag((Y - Xhat)(Y - Xhat)^T) / n
/// With m = 1 this is the PCA estimate. Requires 0 <= k < min(N, n), m >= 1.
/// Throws VarianceCollapseError if any variance falls to <= 1e-300.
FactorFit esa_fit(const DataMatrix& y, int k, int m = 3);

/// Gaussian log-likelihood of (X, Sigma):
///   -(Nn/2) log(2 pi) - (n/2) sum_i log sigma_i^2
///   - (1/2) sum_i |row_i(Y - X)|^2 / sigma_i^2
double log_likelihood(const DataMatrix& y, const Matrix& x,
                      const DiagonalVariances& sigma);

namespace detail {

/// Runs the alternation chain for `m_max` steps, invoking `on_step(step, xhat,
/// sigma2)` after each update pair (step is 1-based). esa_fit and the
/// early-stopping profiler share this path so that a step-m snapshot equals
/// esa_fit(y, k, m) exactly.
void run_chain(const DataMatrix& y, int k, int m_max,
               const std::function<void(int, const Matrix&, const Vector&)>& on_step);

}  // namespace detail
}  // namespace esa
}  // namespace bcvrank

#endif  // BCVRANK_ESA_HPP
