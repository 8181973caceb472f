#include "bcvrank/esa.hpp"

#include <cmath>
#include <numbers>

namespace bcvrank {

DiagonalVariances::DiagonalVariances(Vector s) : sigma2(std::move(s)) {
    for (Index i = 0; i < sigma2.size(); ++i) {
        if (!(sigma2(i) > 0.0) || !std::isfinite(sigma2(i))) {
            throw InvalidInputError("DiagonalVariances: entry " + std::to_string(i) +
                                    " is not a positive finite variance");
        }
    }
}

namespace esa {

DiagonalVariances init_sigma(const DataMatrix& y) {
    const Matrix& v = y.values();
    const double n = static_cast<double>(y.n_obs());
    Vector means = v.rowwise().mean();
    Vector s2 = (v.colwise() - means).rowwise().squaredNorm() / n;
    for (Index i = 0; i < s2.size(); ++i) {
        if (s2(i) <= 0.0) {
            throw DegenerateVarianceError("init_sigma: variable " + std::to_string(i) +
                                          " has zero sample variance (constant row)");
        }
    }
    return DiagonalVariances(std::move(s2));
}

namespace detail {

void run_chain(const DataMatrix& y, int k, int m_max,
               const std::function<void(int, const Matrix&, const Vector&)>& on_step) {
    const Index n_min = std::min(y.n_vars(), y.n_obs());
    if (k < 0 || k >= n_min) {
        throw InvalidRankError("esa_fit: need 0 <= k < min(N, n)");
    }
    if (m_max < 1) {
        throw InvalidRankError("esa_fit: need m >= 1");
    }
    const Matrix& v = y.values();
    const double n = static_cast<double>(y.n_obs());
    Vector sigma2 = init_sigma(y).sigma2;

    Matrix xhat;
    for (int step = 1; step <= m_max; ++step) {
        Vector root = sigma2.cwiseSqrt();
        Matrix whitened = root.cwiseInverse().asDiagonal() * v;
        xhat = root.asDiagonal() * matops::truncate_to_rank(whitened, k);
        sigma2 = (v - xhat).rowwise().squaredNorm() / n;
        for (Index i = 0; i < sigma2.size(); ++i) {
            if (sigma2(i) <= 1e-300) {
                throw VarianceCollapseError(
                    "esa_fit: variance of row " + std::to_string(i) +
                        " collapsed at step " + std::to_string(step),
                    step, i);
            }
        }
        on_step(step, xhat, sigma2);
    }
}

}  // namespace detail

FactorFit esa_fit(const DataMatrix& y, int k, int m) {
    Matrix xhat;
    Vector sigma2;
    detail::run_chain(y, k, m, [&](int step, const Matrix& x, const Vector& s2) {
        if (step == m) {
            xhat = x;
            sigma2 = s2;
        }
    });
    return FactorFit{std::move(xhat), DiagonalVariances(std::move(sigma2)), k, m};
}

double log_likelihood(const DataMatrix& y, const Matrix& x,
                      const DiagonalVariances& sigma) {
    if (x.rows() != y.n_vars() || x.cols() != y.n_obs() ||
        sigma.size() != y.n_vars()) {
        throw InvalidInputError("log_likelihood: dimension mismatch");
    }
    const double n = static_cast<double>(y.n_obs());
    const double nn = static_cast<double>(y.n_vars()) * n;
    Vector rss = (y.values() - x).rowwise().squaredNorm();
    double out = -0.5 * nn * std::log(2.0 * std::numbers::pi);
    out -= 0.5 * n * sigma.sigma2.array().log().sum();
    out -= 0.5 * (rss.array() / sigma.sigma2.array()).sum();
    return out;
}

}  // namespace esa
}  // namespace bcvrank
