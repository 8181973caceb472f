#include "bcvrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcvrank {
namespace metrics {

double err_x(const Matrix& xhat, const Matrix& x) {
    if (xhat.rows() != x.rows() || xhat.cols() != x.cols()) {
        throw InvalidInputError("err_x: shape mismatch");
    }
    return (xhat - x).squaredNorm();
}

OracleProfile oracle_rank(const DataMatrix& y, const Matrix& x,
                          const bcv::Estimator& estimator, const std::vector<int>& ks) {
    if (ks.empty()) {
        throw InvalidInputError("oracle_rank: empty rank grid");
    }
    OracleProfile out;
    for (int k : ks) {
        try {
            FactorFit f = estimator(y, k);
            out.losses[k] = err_x(f.xhat, x);
        } catch (const Error&) {
            // infeasible rank, excluded from the profile
        }
    }
    if (out.losses.empty()) {
        throw NoFeasibleRankError("oracle_rank: estimator failed at every rank");
    }
    out.kstar = out.losses.begin()->first;
    for (const auto& [k, loss] : out.losses) {
        if (loss < out.losses.at(out.kstar)) out.kstar = k;
    }
    return out;
}

double ree(int khat, const std::map<int, double>& losses, int kstar) {
    const double num = losses.at(khat);
    const double den = losses.at(kstar);
    if (den == 0.0) {
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return num / den - 1.0;
}

double true_pe(const Matrix& x, const Matrix& xhat, const DiagonalVariances& sigma) {
    if (xhat.rows() != x.rows() || xhat.cols() != x.cols()) {
        throw InvalidInputError("true_pe: shape mismatch");
    }
    const double nn = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
    return (x - xhat).squaredNorm() / nn + sigma.sigma2.mean();
}

FactorFit baseline_estimate(const DataMatrix& y, int k, BaselineKind kind,
                            const DiagonalVariances* sigma_true) {
    if (k < 0 || k >= std::min(y.n_vars(), y.n_obs())) {
        throw InvalidRankError("baseline_estimate: need 0 <= k < min(N, n)");
    }
    switch (kind) {
        case BaselineKind::Svd: {
            Matrix xhat = matops::truncate_to_rank(y.values(), k);
            return FactorFit{std::move(xhat),
                             DiagonalVariances(Vector::Ones(y.n_vars())), k, 1};
        }
        case BaselineKind::Pca:
            return esa::esa_fit(y, k, 1);
        case BaselineKind::OracleSvd: {
            if (sigma_true == nullptr) {
                throw InvalidInputError("baseline_estimate: oracle SVD needs true Sigma");
            }
            Vector root = sigma_true->sigma2.cwiseSqrt();
            Matrix whitened = root.cwiseInverse().asDiagonal() * y.values();
            Matrix xhat =
                root.asDiagonal() * matops::truncate_to_rank(whitened, k);
            return FactorFit{std::move(xhat), *sigma_true, k, 1};
        }
    }
    throw InvalidInputError("baseline_estimate: unknown kind");
}

EarlyStoppingProfile early_stopping_profile(const DataMatrix& y, const Matrix& x,
                                            const std::vector<int>& ks,
                                            const std::vector<int>& ms) {
    if (ms.empty() || ks.empty()) {
        throw InvalidInputError("early_stopping_profile: empty grids");
    }
    for (int m : ms) {
        if (m < 1 || m > 50) {
            throw InvalidInputError("early_stopping_profile: steps must be in 1..50");
        }
    }
    std::vector<int> sorted_ms = ms;
    std::sort(sorted_ms.begin(), sorted_ms.end());
    const int m_max = sorted_ms.back();

    EarlyStoppingProfile out;
    out.ms = sorted_ms;
    out.err_x.assign(sorted_ms.size(), std::numeric_limits<double>::quiet_NaN());

    // One alternation chain per rank covers every m: a step-m snapshot of the
    // chain is exactly esa_fit(y, k, m).
    for (int k : ks) {
        std::vector<double> loss_at_m(sorted_ms.size(),
                                      std::numeric_limits<double>::quiet_NaN());
        try {
            esa::detail::run_chain(
                y, k, m_max, [&](int step, const Matrix& xhat, const Vector&) {
                    auto it = std::lower_bound(sorted_ms.begin(), sorted_ms.end(), step);
                    if (it != sorted_ms.end() && *it == step) {
                        loss_at_m[static_cast<size_t>(it - sorted_ms.begin())] =
                            err_x(xhat, x);
                    }
                });
        } catch (const VarianceCollapseError&) {
            // snapshots before the collapse keep their losses
        }
        for (size_t i = 0; i < sorted_ms.size(); ++i) {
            if (!std::isnan(loss_at_m[i]) &&
                (std::isnan(out.err_x[i]) || loss_at_m[i] < out.err_x[i])) {
                out.err_x[i] = loss_at_m[i];
            }
        }
    }

    int best = -1;
    for (size_t i = 0; i < sorted_ms.size(); ++i) {
        if (!std::isnan(out.err_x[i]) &&
            (best < 0 || out.err_x[i] < out.err_x[static_cast<size_t>(best)])) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        throw NoFeasibleRankError("early_stopping_profile: no feasible (k, m) cell");
    }
    out.m_opt = sorted_ms[static_cast<size_t>(best)];
    return out;
}

std::pair<std::vector<double>, std::vector<double>> survival_curve(
    const std::vector<double>& rees, const std::vector<double>& thresholds) {
    for (double r : rees) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw InvalidInputError("survival_curve: REE values must be finite and >= 0");
        }
    }
    std::vector<double> props(thresholds.size(), 0.0);
    if (!rees.empty()) {
        for (size_t t = 0; t < thresholds.size(); ++t) {
            int count = 0;
            for (double r : rees) {
                if (r > thresholds[t]) ++count;
            }
            props[t] = static_cast<double>(count) / static_cast<double>(rees.size());
        }
    }
    return {thresholds, props};
}

std::vector<double> default_survival_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 60; ++i) t.push_back(i * 0.05);
    return t;
}

}  // namespace metrics
}  // namespace bcvrank
