#include "bcvrank/matops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace bcvrank {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2 || values_.cols() < 2) {
        throw InvalidInputError("DataMatrix needs at least 2 rows and 2 columns");
    }
    if (!values_.allFinite()) {
        throw InvalidInputError("DataMatrix entries must all be finite");
    }
}

Matrix TruncatedSvd::reconstruct() const {
    if (d.size() == 0) return Matrix::Zero(u.rows(), v.rows());
    return u * d.asDiagonal() * v.transpose();
}

namespace matops {

namespace {

// Flip signs so the largest-magnitude entry of each left vector is positive.
void fix_signs(Matrix& u, Matrix& v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index imax = 0;
        u.col(j).cwiseAbs().maxCoeff(&imax);
        if (u(imax, j) < 0) {
            u.col(j) = -u.col(j);
            v.col(j) = -v.col(j);
        }
    }
}

}  // namespace

TruncatedSvd svd(const Matrix& a) {
    if (!a.allFinite()) {
        throw InvalidInputError("svd: input has non-finite entries");
    }
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
    fix_signs(out.u, out.v);
    return out;
}

TruncatedSvd svd(const DataMatrix& a) { return svd(a.values()); }

TruncatedSvd truncate(const TruncatedSvd& s, int k) {
    if (k < 0 || k > s.rank()) {
        throw InvalidRankError("truncate: rank must be in [0, " +
                               std::to_string(s.rank()) + "], got " + std::to_string(k));
    }
    return TruncatedSvd{s.u.leftCols(k), s.d.head(k), s.v.leftCols(k)};
}

Matrix pinv_factored(const Matrix& l, const Matrix& r) {
    const Index rank = l.cols();
    if (r.rows() != rank) {
        throw InvalidInputError("pinv_factored: inner dimensions disagree");
    }
    auto check_full_rank = [rank](const Matrix& m, const char* name) {
        Eigen::BDCSVD<Matrix> dec(m);
        const Vector& sv = dec.singularValues();
        if (sv.size() < rank || sv(rank - 1) <= 1e-12 * sv(0)) {
            throw DegenerateFactorizationError(std::string("pinv_factored: factor ") +
                                               name + " is rank deficient");
        }
    };
    if (rank == 0) return Matrix::Zero(r.cols(), l.rows());
    check_full_rank(l, "L");
    check_full_rank(r, "R");
    // R^T (R R^T)^-1 (L^T L)^-1 L^T, evaluated right to left with SPD solves.
    Matrix m = (l.transpose() * l).ldlt().solve(l.transpose());
    Matrix w = (r * r.transpose()).ldlt().solve(m);
    return r.transpose() * w;
}

Matrix stiefel_uniform(Rng& rng, Index n_rows, int k) {
    if (k < 0 || k > n_rows) {
        throw InvalidRankError("stiefel_uniform: need 0 <= k <= N");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n_rows, k);
    for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < n_rows; ++i) g(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n_rows, k);
    // Positive R diagonal makes the map Gaussian -> Q unique, hence Haar.
    Vector diag = qr.matrixQR().diagonal().head(k);
    for (Index j = 0; j < k; ++j) {
        if (diag(j) < 0) q.col(j) = -q.col(j);
    }
    return q;
}

SampleSpectrum sample_spectrum(const DataMatrix& y) {
    Eigen::BDCSVD<Matrix> dec(y.values());
    Vector lambdas = dec.singularValues() / std::sqrt(static_cast<double>(y.n_obs()));
    return SampleSpectrum{std::move(lambdas), y.n_vars(), y.n_obs()};
}

namespace {

// Top-k orthonormal eigenvectors of the smaller Gram matrix of A, plus the
// corresponding singular values. `left` selects A A^T (true) or A^T A.
std::pair<Matrix, Vector> gram_frame(const Matrix& a, int k, bool left) {
    Matrix g = left ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const Index m = g.rows();
    Matrix frame(m, k);
    Vector d(k);
    // Eigenvalues come back ascending.
    for (int j = 0; j < k; ++j) {
        frame.col(j) = es.eigenvectors().col(m - 1 - j);
        d(j) = std::sqrt(std::max(0.0, es.eigenvalues()(m - 1 - j)));
    }
    return {std::move(frame), std::move(d)};
}

}  // namespace

Matrix truncate_to_rank(const Matrix& a, int k) {
    const int maxk = static_cast<int>(std::min(a.rows(), a.cols()));
    if (k < 0 || k > maxk) {
        throw InvalidRankError("truncate_to_rank: rank out of range");
    }
    if (k == 0) return Matrix::Zero(a.rows(), a.cols());
    if (k == maxk) return a;
    if (a.rows() <= a.cols()) {
        auto [u, d] = gram_frame(a, k, true);
        return u * (u.transpose() * a);
    }
    auto [v, d] = gram_frame(a, k, false);
    return (a * v) * v.transpose();
}

TruncatedSvd rank_k_svd(const Matrix& a, int k) {
    const int maxk = static_cast<int>(std::min(a.rows(), a.cols()));
    if (k < 0 || k > maxk) {
        throw InvalidRankError("rank_k_svd: rank out of range");
    }
    if (k == 0) {
        return TruncatedSvd{Matrix::Zero(a.rows(), 0), Vector::Zero(0),
                            Matrix::Zero(a.cols(), 0)};
    }
    TruncatedSvd out;
    if (a.rows() <= a.cols()) {
        auto [u, d] = gram_frame(a, k, true);
        out.u = std::move(u);
        out.d = std::move(d);
        out.v.resize(a.cols(), k);
        for (int j = 0; j < k; ++j) {
            if (out.d(j) > 0) {
                out.v.col(j) = a.transpose() * out.u.col(j) / out.d(j);
            } else {
                out.v.col(j).setZero();
            }
        }
    } else {
        auto [v, d] = gram_frame(a, k, false);
        out.v = std::move(v);
        out.d = std::move(d);
        out.u.resize(a.rows(), k);
        for (int j = 0; j < k; ++j) {
            if (out.d(j) > 0) {
                out.u.col(j) = a * out.v.col(j) / out.d(j);
            } else {
                out.u.col(j).setZero();
            }
        }
    }
    fix_signs(out.u, out.v);
    return out;
}

}  // namespace matops
}  // namespace bcvrank
