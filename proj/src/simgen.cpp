#include "bcvrank/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "bcvrank/rng.hpp"

namespace bcvrank {

const char* to_string(FactorCategory c) {
    switch (c) {
        case FactorCategory::Strong: return "strong";
        case FactorCategory::Useful: return "useful";
        case FactorCategory::Harmful: return "harmful";
        case FactorCategory::Undetectable: return "undetectable";
    }
    return "?";
}

void ScenarioSpec::validate(bool allow_empty) const {
    if (n_strong < 0 || n_useful < 0 || n_harmful < 0 || n_undetectable < 0) {
        throw InvalidInputError("ScenarioSpec: counts must be nonnegative");
    }
    if (!allow_empty && k0() < 1) {
        throw InvalidInputError("ScenarioSpec: need at least one factor");
    }
}

ScenarioSpec ScenarioSpec::preset(int type) {
    switch (type) {
        case 1: return {0, 6, 1, 1};
        case 2: return {2, 4, 1, 1};
        case 3: return {3, 3, 1, 1};
        case 4: return {3, 1, 3, 1};
        case 5: return {1, 3, 3, 1};
        case 6: return {0, 1, 6, 1};
        default:
            throw InvalidInputError("ScenarioSpec: preset type must be 1..6");
    }
}

ScenarioSpec ScenarioSpec::parse(const std::string& name) {
    if (name.size() == 5 && name.rfind("type", 0) == 0 && name[4] >= '1' &&
        name[4] <= '6') {
        return preset(name[4] - '0');
    }
    throw InvalidInputError("ScenarioSpec: unknown preset '" + name + "'");
}

std::string ScenarioSpec::name() const {
    for (int t = 1; t <= 6; ++t) {
        const ScenarioSpec p = preset(t);
        if (p.n_strong == n_strong && p.n_useful == n_useful &&
            p.n_harmful == n_harmful && p.n_undetectable == n_undetectable) {
            return "type" + std::to_string(t);
        }
    }
    return std::to_string(n_strong) + "/" + std::to_string(n_useful) + "/" +
           std::to_string(n_harmful) + "/" + std::to_string(n_undetectable);
}

void NoiseSpec::validate() const {
    if (var_sigma2 < 0.0 || !std::isfinite(var_sigma2)) {
        throw InvalidInputError("NoiseSpec: Var(sigma^2) must be finite and >= 0");
    }
}

double NoiseSpec::alpha() const { return 2.0 + 1.0 / var_sigma2; }
double NoiseSpec::beta() const { return 1.0 + 1.0 / var_sigma2; }

namespace simgen {

const std::array<std::pair<Index, Index>, 10> kPresetSizes = {{
    {20, 1000},
    {100, 5000},
    {20, 100},
    {200, 1000},
    {50, 50},
    {500, 500},
    {100, 20},
    {1000, 200},
    {1000, 20},
    {5000, 100},
}};

std::pair<double, double> thresholds(double gamma, double sigma_bar2) {
    if (!(gamma > 0.0) || !(sigma_bar2 > 0.0)) {
        throw InvalidInputError("thresholds: gamma and sigma_bar2 must be positive");
    }
    const double mu_f = std::sqrt(gamma);
    const double half = (1.0 + gamma) / 2.0;
    const double mu_f_star = half + std::sqrt(half * half + 3.0 * gamma);
    return {sigma_bar2 * mu_f, sigma_bar2 * mu_f_star};
}

std::pair<Vector, std::vector<FactorCategory>> factor_strengths(
    const ScenarioSpec& spec, Index n_vars, double gamma, double sigma_bar2) {
    spec.validate();
    const auto [mu_f, mu_f_star] = thresholds(gamma, sigma_bar2);

    std::vector<std::pair<double, FactorCategory>> ladder;
    ladder.reserve(static_cast<size_t>(spec.k0()));
    // Within each category, descending strength.
    for (int j = spec.n_strong; j >= 1; --j) {
        ladder.emplace_back((j + 0.5) * static_cast<double>(n_vars),
                            FactorCategory::Strong);
    }
    for (int j = spec.n_useful; j >= 1; --j) {
        ladder.emplace_back((j + 0.5) * mu_f_star, FactorCategory::Useful);
    }
    for (int j = spec.n_harmful; j >= 1; --j) {
        ladder.emplace_back(mu_f + (mu_f_star - mu_f) * j / (spec.n_harmful + 1),
                            FactorCategory::Harmful);
    }
    for (int j = spec.n_undetectable; j >= 1; --j) {
        ladder.emplace_back(mu_f * j / (spec.n_undetectable + 1),
                            FactorCategory::Undetectable);
    }

    // Exact ties get a relative nudge; a genuine inversion is an error.
    for (size_t i = 1; i < ladder.size(); ++i) {
        if (ladder[i].first == ladder[i - 1].first) {
            ladder[i].first *= 1.0 - 1e-6;
        }
        if (ladder[i].first >= ladder[i - 1].first) {
            throw StrengthCollisionError(
                "factor_strengths: ladder is not strictly decreasing (N too small "
                "for the requested scenario)");
        }
    }

    Vector d2(spec.k0());
    std::vector<FactorCategory> cats(static_cast<size_t>(spec.k0()));
    for (size_t i = 0; i < ladder.size(); ++i) {
        d2(static_cast<Index>(i)) = ladder[i].first;
        cats[i] = ladder[i].second;
    }
    return {std::move(d2), std::move(cats)};
}

DiagonalVariances sample_sigmas(Rng& rng, Index n_vars, const NoiseSpec& noise) {
    noise.validate();
    if (noise.var_sigma2 == 0.0) {
        return DiagonalVariances(Vector::Ones(n_vars));
    }
    // 1/Gamma(alpha, rate = beta) is InvGamma(alpha, beta).
    std::gamma_distribution<double> gamma_draw(noise.alpha(), 1.0 / noise.beta());
    Vector s2(n_vars);
    for (Index i = 0; i < n_vars; ++i) {
        s2(i) = 1.0 / gamma_draw(rng);
    }
    return DiagonalVariances(std::move(s2));
}

SignalDraw sample_signal(Rng& rng, Index n_vars, Index n_obs, const Vector& d2,
                         const DiagonalVariances& sigma) {
    const int k0 = static_cast<int>(d2.size());
    if (k0 > std::min(n_vars, n_obs)) {
        throw InvalidRankError("sample_signal: k0 exceeds min(N, n)");
    }
    Vector d = d2.cwiseSqrt();
    Matrix v = matops::stiefel_uniform(rng, n_obs, k0);
    Matrix u_star = matops::stiefel_uniform(rng, n_vars, k0);

    // Left frame of Sigma^{-1/2} U* D V^T; rank is k0 so the top-k0 frame is
    // well defined.
    Vector inv_root = sigma.sigma2.cwiseSqrt().cwiseInverse();
    Matrix a = inv_root.asDiagonal() * u_star * d.asDiagonal() * v.transpose();
    Matrix u = matops::rank_k_svd(a, k0).u;

    SignalDraw out;
    const double root_n = std::sqrt(static_cast<double>(n_obs));
    out.x = root_n * (sigma.sigma2.cwiseSqrt().asDiagonal() *
                      Matrix(u * d.asDiagonal() * v.transpose()));
    out.u = std::move(u);
    out.v = std::move(v);
    return out;
}

namespace {

Matrix gaussian_matrix(Rng& rng, Index n_rows, Index n_cols) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix e(n_rows, n_cols);
    for (Index j = 0; j < n_cols; ++j) {
        for (Index i = 0; i < n_rows; ++i) e(i, j) = gauss(rng);
    }
    return e;
}

}  // namespace

GeneratedDataset generate_dataset(std::uint64_t seed, const ScenarioSpec& spec,
                                  Index n_vars, Index n_obs, const NoiseSpec& noise) {
    spec.validate();
    Rng rng = make_rng(seed);

    DiagonalVariances sigma = sample_sigmas(rng, n_vars, noise);
    const double sigma_bar2 = sigma.sigma2.mean();
    const double gamma = static_cast<double>(n_vars) / static_cast<double>(n_obs);
    auto [d2, cats] = factor_strengths(spec, n_vars, gamma, sigma_bar2);

    SignalDraw sig = sample_signal(rng, n_vars, n_obs, d2, sigma);
    Matrix e = gaussian_matrix(rng, n_vars, n_obs);
    Matrix y = sig.x + Matrix(sigma.sigma2.cwiseSqrt().asDiagonal() * e);

    GeneratedDataset out{DataMatrix(std::move(y)),
                         std::move(sig.x),
                         std::move(sigma),
                         std::move(sig.u),
                         std::move(sig.v),
                         d2.cwiseSqrt(),
                         std::move(cats),
                         seed};
    return out;
}

GeneratedDataset generate_white_noise(std::uint64_t seed, Index n_vars, Index n_obs,
                                      const NoiseSpec& noise) {
    Rng rng = make_rng(seed);
    DiagonalVariances sigma = sample_sigmas(rng, n_vars, noise);
    Matrix e = gaussian_matrix(rng, n_vars, n_obs);
    Matrix y = sigma.sigma2.cwiseSqrt().asDiagonal() * e;
    return GeneratedDataset{DataMatrix(std::move(y)),
                            Matrix::Zero(n_vars, n_obs),
                            std::move(sigma),
                            Matrix::Zero(n_vars, 0),
                            Matrix::Zero(n_obs, 0),
                            Vector::Zero(0),
                            {},
                            seed};
}

}  // namespace simgen
}  // namespace bcvrank
