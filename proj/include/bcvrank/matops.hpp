#ifndef BCVRANK_MATOPS_HPP
#define BCVRANK_MATOPS_HPP

#include <vector>

#include "bcvrank/errors.hpp"
#include "bcvrank/types.hpp"

namespace bcvrank {

/// Data matrix with a row per variable and a column per observation.
/// Construction validates that every entry is finite and both dims are >= 2.
class DataMatrix {
public:
    explicit DataMatrix(Matrix values);

    const Matrix& values() const { return values_; }
    Index n_vars() const { return values_.rows(); }
    Index n_obs() const { return values_.cols(); }

private:
    Matrix values_;
};

/// Thin SVD A = U * diag(d) * V^T with d nonincreasing and column-orthonormal
/// U, V. Signs are fixed so the largest-magnitude entry of each left singular
/// vector is positive.
struct TruncatedSvd {
    Matrix u;  // N x k
    Vector d;  // length k, nonincreasing, >= 0
    Matrix v;  // n x k

    int rank() const { return static_cast<int>(d.size()); }
    Matrix reconstruct() const;
};

/// Singular values of Y divided by sqrt(n); lambda_i^2 are the eigenvalues of
/// Y Y^T / n.
struct SampleSpectrum {
    Vector lambdas;  // length min(N, n), nonincreasing
    Index n_vars;    // N
    Index n_obs;     // n
};

namespace matops {

/// Full thin SVD, k = min(N, n). Throws InvalidInputError on non-finite input.
TruncatedSvd svd(const Matrix& a);
TruncatedSvd svd(const DataMatrix& a);

/// Keeps the k largest singular triples. Throws InvalidRankError unless
/// 0 <= k <= s.rank().
TruncatedSvd truncate(const TruncatedSvd& s, int k);

/// Moore-Penrose inverse of L*R computed as R^T (R R^T)^-1 (L^T L)^-1 L^T.
/// Both factors must have full rank r (smallest singular value above
/// 1e-12 times the largest), else DegenerateFactorizationError.
Matrix pinv_factored(const Matrix& l, const Matrix& r);

/// Column-orthonormal N x k frame drawn uniformly (Haar) from the Stiefel
/// manifold: QR of a standard Gaussian matrix with the R-diagonal sign
/// convention. Throws InvalidRankError if k > N.
Matrix stiefel_uniform(Rng& rng, Index n_rows, int k);

/// Sample spectrum of a data matrix (singular values / sqrt(n)).
SampleSpectrum sample_spectrum(const DataMatrix& y);

/// Best rank-k approximation of A computed from the eigendecomposition of
/// the smaller Gram matrix. Equal to truncate(svd(a), k).reconstruct() up to
/// roundoff; used on the hot paths where the full SVD is too slow.
Matrix truncate_to_rank(const Matrix& a, int k);

/// Rank-k singular triple (U_k, d_k, V_k) via the same Gram route. The frame
/// on the larger side is recovered by back-multiplication, so its columns are
/// orthonormal only up to ~ (d_1/d_k)^2 * eps; callers needing the strict
/// 1e-10 contract should use svd() + truncate().
TruncatedSvd rank_k_svd(const Matrix& a, int k);

}  // namespace matops
}  // namespace bcvrank

#endif  // BCVRANK_MATOPS_HPP
