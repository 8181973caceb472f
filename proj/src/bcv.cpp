#include "bcvrank/bcv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bcvrank {
namespace bcv {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Estimator esa_estimator(int m) {
    return [m](const DataMatrix& y, int k) { return esa::esa_fit(y, k, m); };
}

Estimator svd_estimator() {
    return [](const DataMatrix& y, int k) {
        Matrix xhat = matops::truncate_to_rank(y.values(), k);
        return FactorFit{std::move(xhat),
                         DiagonalVariances(Vector::Ones(y.n_vars())), k, 1};
    };
}

std::pair<double, double> holdout_fraction(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidInputError("holdout_fraction: aspect ratio must be positive");
    }
    const double root = std::sqrt(gamma);
    const double bar_gamma = std::pow((root + 1.0 / root) / 2.0, 2);
    const double sqrt_rho =
        std::sqrt(2.0) / (std::sqrt(bar_gamma) + std::sqrt(bar_gamma + 3.0));
    return {sqrt_rho * sqrt_rho, bar_gamma};
}

std::pair<Index, Index> partition_sizes(Index n_vars, Index n_obs) {
    if (n_vars < 3 || n_obs < 3) {
        throw InvalidInputError("partition_sizes: need N, n >= 3");
    }
    const auto [rho, bar_gamma] =
        holdout_fraction(static_cast<double>(n_vars) / static_cast<double>(n_obs));
    const double area = rho * static_cast<double>(n_vars) * static_cast<double>(n_obs);
    const double side = std::sqrt(area);
    auto clamp_round = [](double x, Index hi) {
        return std::clamp<Index>(static_cast<Index>(std::llround(x)), 2, hi);
    };
    Index n1_rows = clamp_round(side, n_vars - 1);
    Index n1_cols = clamp_round(area / static_cast<double>(n1_rows), n_obs - 1);
    // If the column side hit a bound, re-balance the row side to keep the area.
    n1_rows = clamp_round(area / static_cast<double>(n1_cols), n_vars - 1);
    return {n_vars - n1_rows, n_obs - n1_cols};
}

namespace {

std::vector<Index> sample_without_replacement(Rng& rng, Index population, Index count) {
    std::vector<Index> pool(static_cast<size_t>(population));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index j = 0; j < count; ++j) {
        std::uniform_int_distribution<Index> pick(j, population - 1);
        std::swap(pool[static_cast<size_t>(j)], pool[static_cast<size_t>(pick(rng))]);
    }
    pool.resize(static_cast<size_t>(count));
    return pool;
}

}  // namespace

HoldoutPlan sample_partition(Rng& rng, Index n_vars, Index n_obs, Index n0_rows,
                             Index n0_cols) {
    if (n0_rows < 1 || n0_rows > n_vars - 2 || n0_cols < 1 || n0_cols > n_obs - 2) {
        throw InvalidInputError("sample_partition: held-out sizes out of range");
    }
    HoldoutPlan plan;
    plan.rows_out = sample_without_replacement(rng, n_vars, n0_rows);
    plan.cols_out = sample_without_replacement(rng, n_obs, n0_cols);
    plan.rho = (static_cast<double>(n_obs - n0_cols) / n_obs) *
               (static_cast<double>(n_vars - n0_rows) / n_vars);
    return plan;
}

Matrix predict_heldout(const Matrix& y01, const Matrix& y10, const Matrix& x11hat,
                       const DiagonalVariances& sigma1hat, int k) {
    const Index n1_rows = x11hat.rows();
    const Index n1_cols = x11hat.cols();
    if (y01.cols() != n1_cols || y10.rows() != n1_rows ||
        sigma1hat.size() != n1_rows) {
        throw InvalidInputError("predict_heldout: block dimensions disagree");
    }
    if (k == 0) return Matrix::Zero(y01.rows(), y10.cols());

    Vector inv_root = sigma1hat.sigma2.cwiseSqrt().cwiseInverse();
    Matrix whitened = inv_root.asDiagonal() * x11hat;
    TruncatedSvd dec = matops::rank_k_svd(whitened, k);
    // Rank test on the Gram-eigenvalue scale, where roundoff lives at ~eps.
    if (dec.d(k - 1) * dec.d(k - 1) <= 1e-12 * dec.d(0) * dec.d(0)) {
        throw DegenerateFitError("predict_heldout: fitted signal has numerical rank below " +
                                 std::to_string(k));
    }
    // Y01 * V_k D_k^-1 U_k^T * Sigma^{-1/2} * Y10
    Matrix right = dec.u.transpose() * (inv_root.asDiagonal() * y10);
    return (y01 * dec.v) * dec.d.head(k).cwiseInverse().asDiagonal() * right;
}

bool variance_guard(const Vector& sigma2hat) {
    const Index n = sigma2hat.size();
    if (n == 0) {
        throw InvalidInputError("variance_guard: empty variance vector");
    }
    double max_log = -std::numeric_limits<double>::infinity();
    double mean_log = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double v = std::abs(sigma2hat(i));
        if (v == 0.0) return true;
        const double lg = std::log10(v);
        max_log = std::max(max_log, lg);
        mean_log += lg;
    }
    mean_log /= static_cast<double>(n);
    return mean_log < -6.0 + max_log;
}

std::vector<int> default_k_grid(Index n_vars, Index n_obs, int kmax) {
    const auto [n0_rows, n0_cols] = partition_sizes(n_vars, n_obs);
    const Index held_in = std::min(n_vars - n0_rows, n_obs - n0_cols);
    const int top = std::min<int>(kmax, static_cast<int>(held_in) - 1);
    std::vector<int> ks;
    for (int k = 0; k <= top; ++k) ks.push_back(k);
    return ks;
}

namespace {

Matrix submatrix(const Matrix& y, const std::vector<Index>& rows,
                 const std::vector<Index>& cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index j = 0; j < out.cols(); ++j) {
        for (Index i = 0; i < out.rows(); ++i) {
            out(i, j) = y(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
        }
    }
    return out;
}

std::vector<Index> complement(Index total, const std::vector<Index>& subset) {
    std::vector<bool> mark(static_cast<size_t>(total), false);
    for (Index i : subset) mark[static_cast<size_t>(i)] = true;
    std::vector<Index> out;
    out.reserve(static_cast<size_t>(total) - subset.size());
    for (Index i = 0; i < total; ++i) {
        if (!mark[static_cast<size_t>(i)]) out.push_back(i);
    }
    return out;
}

}  // namespace

BcvCurve bcv_select(const DataMatrix& y, const std::vector<int>& ks, Rng& rng,
                    const BcvOptions& opts) {
    if (opts.reps < 1) {
        throw InvalidInputError("bcv_select: need reps >= 1");
    }
    if (ks.empty()) {
        throw InvalidInputError("bcv_select: empty rank grid");
    }
    Estimator fit = opts.estimator ? opts.estimator : esa_estimator(3);

    const Index n_vars = y.n_vars();
    const Index n_obs = y.n_obs();
    const auto [n0_rows, n0_cols] = partition_sizes(n_vars, n_obs);
    const Index n1_rows = n_vars - n0_rows;
    const Index n1_cols = n_obs - n0_cols;
    for (int k : ks) {
        if (k < 0 || k >= std::min(n1_rows, n1_cols)) {
            throw InvalidRankError("bcv_select: rank " + std::to_string(k) +
                                   " not in [0, min(N1, n1))");
        }
    }
    std::vector<int> sorted_ks = ks;
    std::sort(sorted_ks.begin(), sorted_ks.end());

    const int n_ranks = static_cast<int>(sorted_ks.size());
    BcvCurve curve;
    curve.ks = sorted_ks;
    curve.pe = Matrix::Constant(opts.reps, n_ranks, kNaN);

    for (int rep = 0; rep < opts.reps; ++rep) {
        HoldoutPlan plan = sample_partition(rng, n_vars, n_obs, n0_rows, n0_cols);
        std::vector<Index> rows_in = complement(n_vars, plan.rows_out);
        std::vector<Index> cols_in = complement(n_obs, plan.cols_out);
        Matrix y00 = submatrix(y.values(), plan.rows_out, plan.cols_out);
        Matrix y01 = submatrix(y.values(), plan.rows_out, cols_in);
        Matrix y10 = submatrix(y.values(), rows_in, plan.cols_out);
        DataMatrix y11(submatrix(y.values(), rows_in, cols_in));

        const double denom = static_cast<double>(n0_rows) * static_cast<double>(n0_cols);
        for (int j = 0; j < n_ranks; ++j) {
            const int k = sorted_ks[static_cast<size_t>(j)];
            try {
                FactorFit f = fit(y11, k);
                if (variance_guard(f.sigma2hat.sigma2)) {
                    if (!curve.truncated_at || k < *curve.truncated_at) {
                        curve.truncated_at = k;
                    }
                    break;
                }
                Matrix x00 = predict_heldout(y01, y10, f.xhat, f.sigma2hat, k);
                curve.pe(rep, j) = (y00 - x00).squaredNorm() / denom;
            } catch (const VarianceCollapseError&) {
                if (!curve.truncated_at || k < *curve.truncated_at) curve.truncated_at = k;
                break;
            } catch (const DegenerateFitError&) {
                if (!curve.truncated_at || k < *curve.truncated_at) curve.truncated_at = k;
                break;
            }
        }
    }

    // A rank must have been evaluated in at least half the replicates to enter
    // the argmin.
    curve.pe_mean = Vector::Constant(n_ranks, kNaN);
    int best = -1;
    for (int j = 0; j < n_ranks; ++j) {
        int evaluated = 0;
        double sum = 0.0;
        for (int rep = 0; rep < opts.reps; ++rep) {
            if (!std::isnan(curve.pe(rep, j))) {
                ++evaluated;
                sum += curve.pe(rep, j);
            }
        }
        if (2 * evaluated >= opts.reps && evaluated > 0) {
            curve.pe_mean(j) = sum / evaluated;
            if (best < 0 || curve.pe_mean(j) < curve.pe_mean(best)) best = j;
        }
    }
    if (best < 0) {
        throw NoFeasibleRankError(
            "bcv_select: the variance guard ruled out every candidate rank");
    }
    curve.khat = sorted_ks[static_cast<size_t>(best)];
    return curve;
}

}  // namespace bcv
}  // namespace bcvrank
