#include "bcvrank/selectors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace bcvrank {

void SelectorConfig::validate(Index n_vars, Index n_obs) const {
    const Index n_min = std::min(n_vars, n_obs);
    if (kmax <= 0 || kmax >= n_min) {
        throw InvalidRankError("SelectorConfig: need 0 < kmax < min(N, n)");
    }
    if (n_perm < 19) {
        throw InvalidInputError("SelectorConfig: need n_perm >= 19");
    }
    if (!(pa_quantile > 0.0 && pa_quantile < 1.0)) {
        throw InvalidInputError("SelectorConfig: pa_quantile must be in (0, 1)");
    }
}

namespace selectors {

namespace {

// Eigenvalues (descending) of Z Z^T / n via the Gram matrix on the smaller side.
Vector gram_eigenvalues(const Matrix& z) {
    Matrix gram = (z.rows() <= z.cols()) ? Matrix(z * z.transpose())
                                         : Matrix(z.transpose() * z);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    Vector ev = es.eigenvalues().reverse() / static_cast<double>(z.cols());
    return ev.cwiseMax(0.0);
}

}  // namespace

int pa_select(const DataMatrix& y, Rng& rng, const SelectorConfig& cfg) {
    cfg.validate(y.n_vars(), y.n_obs());
    const Index n_rows = y.n_vars();
    const Index n_cols = y.n_obs();
    const int kmax = cfg.kmax;

    // Row means and variances are permutation invariant, so standardize once;
    // permuting Z's rows then equals standardizing the permuted data.
    Vector means = y.values().rowwise().mean();
    Matrix z = y.values().colwise() - means;
    if (!cfg.pa_use_covariance) {
        Vector sd = (z.rowwise().squaredNorm() / static_cast<double>(n_cols)).cwiseSqrt();
        for (Index i = 0; i < sd.size(); ++i) {
            if (sd(i) <= 0.0) {
                throw DegenerateVarianceError("pa_select: variable " + std::to_string(i) +
                                              " is constant; correlation undefined");
            }
        }
        z = sd.cwiseInverse().asDiagonal() * z;
    }

    Vector observed = gram_eigenvalues(z);

    // j-th column holds the permuted j-th eigenvalues across replicates.
    Matrix permuted(cfg.n_perm, kmax);
    Matrix shuffled = z;
    for (int rep = 0; rep < cfg.n_perm; ++rep) {
        for (Index i = 0; i < n_rows; ++i) {
            // Fisher-Yates within each row, one independent stream of draws.
            for (Index j = n_cols - 1; j > 0; --j) {
                std::uniform_int_distribution<Index> pick(0, j);
                std::swap(shuffled(i, j), shuffled(i, pick(rng)));
            }
        }
        permuted.row(rep) = gram_eigenvalues(shuffled).head(kmax).transpose();
    }

    // Empirical quantile as an order statistic: with 99 draws and q = .95 the
    // reference is the 95th smallest.
    const int q_idx = std::clamp(
        static_cast<int>(std::ceil(cfg.pa_quantile * cfg.n_perm)) - 1, 0, cfg.n_perm - 1);

    int retained = 0;
    for (int j = 0; j < kmax; ++j) {
        Vector col = permuted.col(j);
        std::nth_element(col.data(), col.data() + q_idx, col.data() + cfg.n_perm);
        if (observed(j) > col(q_idx)) {
            ++retained;
        } else {
            break;
        }
    }
    return retained;
}

namespace {

// Iterated Onatski-style calibration: regress the five eigenvalues past the
// current khat on (j-1)^{2/3} and set delta = 2 |slope|, until khat is stable.
double calibrate_ed_delta(const Vector& lam2, int kmax) {
    const int m = static_cast<int>(lam2.size());
    auto khat_for = [&](double delta) {
        int khat = 0;
        for (int i = 1; i <= kmax; ++i) {
            if (lam2(i - 1) - lam2(i) >= delta) khat = i;
        }
        return khat;
    };
    int khat = kmax;
    double delta = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        const int j_lo = khat + 1;
        const int j_hi = std::min(khat + 5, m);
        if (j_hi - j_lo + 1 < 2) break;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int j = j_lo; j <= j_hi; ++j) {
            const double x = std::pow(static_cast<double>(j - 1), 2.0 / 3.0);
            const double yv = lam2(j - 1);
            sx += x;
            sy += yv;
            sxx += x * x;
            sxy += x * yv;
        }
        const double cnt = static_cast<double>(j_hi - j_lo + 1);
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        delta = 2.0 * std::abs(slope);
        const int next = khat_for(delta);
        if (next == khat) break;
        khat = next;
    }
    return delta;
}

}  // namespace

int ed_select(const SampleSpectrum& spec, const SelectorConfig& cfg) {
    const int m = static_cast<int>(spec.lambdas.size());
    if (cfg.kmax + 1 > m) {
        throw InvalidRankError("ed_select: need kmax + 1 <= number of singular values");
    }
    Vector lam2 = spec.lambdas.array().square();
    const double delta =
        cfg.ed_delta ? *cfg.ed_delta : calibrate_ed_delta(lam2, cfg.kmax);
    int khat = 0;
    for (int i = 1; i <= cfg.kmax; ++i) {
        if (lam2(i - 1) - lam2(i) >= delta) khat = i;
    }
    return khat;
}

int er_select(const SampleSpectrum& spec, const SelectorConfig& cfg) {
    const int m = static_cast<int>(spec.lambdas.size());
    if (m < 3) {
        throw InvalidInputError("er_select: need at least 3 singular values");
    }
    Vector lam2 = spec.lambdas.array().square();
    const double total = lam2.sum();

    int kmax;
    if (cfg.er_kmax) {
        kmax = *cfg.er_kmax;
    } else {
        // Count of eigenvalues above the mean, capped at 0.1 m.
        const double mean = total / m;
        int above = 0;
        for (int j = 0; j < m; ++j) {
            if (lam2(j) >= mean) ++above;
        }
        kmax = std::min(above, static_cast<int>(0.1 * m));
        kmax = std::max(kmax, 1);
    }
    kmax = std::min(kmax, m - 1);

    const double mock = total / std::log(static_cast<double>(m));
    int best = 0;
    double best_ratio = -1.0;
    for (int i = 0; i <= kmax; ++i) {
        const double num = (i == 0) ? mock : lam2(i - 1);
        const double den = lam2(i);
        const double ratio =
            (den > 0.0) ? num / den : std::numeric_limits<double>::infinity();
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = i;
        }
        if (den <= 0.0) break;
    }
    return best;
}

int ic1_select(const DataMatrix& y, const SelectorConfig& cfg) {
    cfg.validate(y.n_vars(), y.n_obs());
    const double n = static_cast<double>(y.n_obs());
    const double p = static_cast<double>(y.n_vars());
    SampleSpectrum spec = matops::sample_spectrum(y);
    Vector lam2 = spec.lambdas.array().square();

    // V(k) = sum_{j>k} d_j^2 / (nN) with d = sqrt(n) * lambda.
    const int m = static_cast<int>(lam2.size());
    Vector vk(cfg.kmax + 1);
    double tail = lam2.sum();
    for (int k = 0; k <= cfg.kmax; ++k) {
        vk(k) = tail / p;
        if (k < m) tail -= lam2(k);
    }

    const double penalty = ((n + p) / (n * p)) * std::log(n * p / (n + p));
    int best = -1;
    double best_ic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= cfg.kmax; ++k) {
        if (vk(k) <= 0.0) {
            std::cerr << "ic1_select: V(k) = 0 at k = " << k
                      << "; input is exactly low rank\n";
            return k;
        }
        const double ic = std::log(vk(k)) + k * penalty;
        if (ic < best_ic) {
            best_ic = ic;
            best = k;
        }
    }
    return best;
}

int ne_select(const SampleSpectrum& spec, const SelectorConfig& cfg) {
    const int m = static_cast<int>(spec.lambdas.size());
    if (m < 2) {
        throw InvalidInputError("ne_select: need at least 2 singular values");
    }
    const double n_big = static_cast<double>(spec.n_vars);
    const double n_obs = static_cast<double>(spec.n_obs);
    Vector lam2 = spec.lambdas.array().square();
    Vector lam4 = lam2.array().square();

    const int cap = cfg.ne_full_scan ? m - 1 : std::min(cfg.kmax, m - 1);
    double tail2 = lam2.sum();
    double tail4 = lam4.sum();
    int best = 0;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= cap; ++i) {
        if (i > 0) {
            tail2 -= lam2(i - 1);
            tail4 -= lam4(i - 1);
        }
        if (tail2 <= 0.0) break;
        const double t = n_big * ((n_big - i) * tail4 / (tail2 * tail2) -
                                  (1.0 + n_big / n_obs)) -
                         n_big / n_obs;
        const double obj = 0.5 * std::pow(n_obs / n_big, 2) * t * t + 2.0 * (i + 1);
        if (obj < best_obj) {
            best_obj = obj;
            best = i;
        }
    }
    return best;
}

}  // namespace selectors
}  // namespace bcvrank
