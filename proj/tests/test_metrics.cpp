#include <doctest.h>

#include <cmath>

#include "bcvrank/metrics.hpp"
#include "bcvrank/simgen.hpp"
#include "test_util.hpp"

using namespace bcvrank;
using testutil::gaussian;

TEST_CASE("err_x closed cases and loop oracle") {
    Matrix x = Matrix::Zero(2, 2);
    CHECK(metrics::err_x(x, x) == 0.0);
    Matrix ones = Matrix::Ones(2, 2);
    CHECK(metrics::err_x(x + ones, x) == doctest::Approx(4.0));

    Rng rng(3);
    Matrix a = gaussian(rng, 4, 5), b = gaussian(rng, 4, 5);
    double oracle = 0.0;
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 5; ++j) oracle += std::pow(a(i, j) - b(i, j), 2);
    }
    CHECK(metrics::err_x(a, b) == doctest::Approx(oracle).epsilon(1e-12));

    Matrix wrong = Matrix::Zero(3, 2);
    CHECK_THROWS_AS(metrics::err_x(wrong, x), InvalidInputError);
}

TEST_CASE("oracle rank on a noiseless planted signal") {
    Rng rng(5);
    Matrix l = gaussian(rng, 15, 3);
    Matrix r = gaussian(rng, 3, 20);
    Matrix x = l * r;
    DataMatrix y(x + 1e-9 * gaussian(rng, 15, 20));
    auto svd_fit = [](const DataMatrix& data, int k) {
        return metrics::baseline_estimate(data, k, metrics::BaselineKind::Svd);
    };
    metrics::OracleProfile p = metrics::oracle_rank(y, x, svd_fit, {0, 1, 2, 3, 4, 5, 6});
    CHECK(p.kstar == 3);
}

TEST_CASE("oracle rank is zero on pure noise") {
    auto svd_fit = [](const DataMatrix& data, int k) {
        return metrics::baseline_estimate(data, k, metrics::BaselineKind::Svd);
    };
    int zeros = 0;
    for (int rep = 0; rep < 10; ++rep) {
        GeneratedDataset data = simgen::generate_white_noise(
            static_cast<std::uint64_t>(50 + rep), 30, 30, NoiseSpec{0.0});
        metrics::OracleProfile p =
            metrics::oracle_rank(data.y, data.x, svd_fit, {0, 1, 2, 3, 4});
        if (p.kstar == 0) ++zeros;
    }
    CHECK(zeros == 10);  // adding noise directions only increases the loss
}

TEST_CASE("ree closed cases") {
    std::map<int, double> losses{{0, 2.0}, {1, 1.0}};
    CHECK(metrics::ree(1, losses, 1) == 0.0);
    CHECK(metrics::ree(0, losses, 1) == doctest::Approx(1.0));

    std::map<int, double> degenerate{{0, 1.0}, {1, 0.0}};
    CHECK(std::isinf(metrics::ree(0, degenerate, 1)));

    Rng rng(7);
    std::map<int, double> profile;
    std::uniform_real_distribution<double> un(0.5, 4.0);
    for (int k = 0; k <= 6; ++k) profile[k] = un(rng);
    int kstar = 0;
    for (const auto& [k, v] : profile) {
        if (v < profile[kstar]) kstar = k;
    }
    for (int k = 0; k <= 6; ++k) {
        CHECK(metrics::ree(k, profile, kstar) ==
              doctest::Approx(profile[k] / profile[kstar] - 1.0).epsilon(1e-12));
        CHECK(metrics::ree(k, profile, kstar) >= 0.0);
    }
}

TEST_CASE("true prediction error closed cases") {
    Rng rng0(9);
    Matrix x = gaussian(rng0, 4, 6);
    DiagonalVariances unit(Vector::Ones(4));
    CHECK(metrics::true_pe(x, x, unit) == doctest::Approx(1.0));

    const double nn = 4.0 * 6.0;
    Matrix scaled = x * std::sqrt(nn) / x.norm();  // |X|_F^2 = nN
    CHECK(metrics::true_pe(scaled, Matrix::Zero(4, 6), unit) == doctest::Approx(2.0));

    // loop oracle
    Rng rng(11);
    Matrix a = gaussian(rng, 3, 5), b = gaussian(rng, 3, 5);
    Vector s2(3);
    s2 << 0.5, 1.0, 2.5;
    double sum = 0.0;
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 5; ++j) sum += std::pow(a(i, j) - b(i, j), 2);
    }
    const double oracle = sum / 15.0 + s2.mean();
    CHECK(metrics::true_pe(a, b, DiagonalVariances(s2)) ==
          doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("pca baseline is exactly one alternation step") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        DataMatrix y(gaussian(rng, 10, 16));
        for (int k : {1, 2, 4}) {
            FactorFit pca = metrics::baseline_estimate(y, k, metrics::BaselineKind::Pca);
            FactorFit one = esa::esa_fit(y, k, 1);
            CHECK((pca.xhat - one.xhat).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("oracle svd with unit variances reduces to the svd baseline") {
    Rng rng(17);
    DataMatrix y(gaussian(rng, 8, 12));
    DiagonalVariances unit(Vector::Ones(8));
    FactorFit osvd = metrics::baseline_estimate(y, 3, metrics::BaselineKind::OracleSvd, &unit);
    FactorFit svd = metrics::baseline_estimate(y, 3, metrics::BaselineKind::Svd);
    CHECK((osvd.xhat - svd.xhat).norm() <= 1e-10 * (1.0 + svd.xhat.norm()));
}

TEST_CASE("early stopping profile on a noiseless-limit instance is flat") {
    Rng rng(19);
    Matrix l = gaussian(rng, 12, 2);
    Matrix r = gaussian(rng, 2, 18);
    Matrix x = l * r;
    DataMatrix y(x + 1e-9 * gaussian(rng, 12, 18));
    metrics::EarlyStoppingProfile p =
        metrics::early_stopping_profile(y, x, {0, 1, 2, 3, 4}, {1, 2, 3, 5});
    for (double e : p.err_x) {
        CHECK(e == doctest::Approx(p.err_x.front()).epsilon(1e-3));
    }
}

TEST_CASE("early stopping profile snapshots match separate fits") {
    Rng rng(23);
    GeneratedDataset data = simgen::generate_dataset(777, ScenarioSpec{1, 2, 1, 0}, 25,
                                                     60, NoiseSpec{1.0});
    std::vector<int> ks{0, 1, 2, 3, 4, 5, 6};
    metrics::EarlyStoppingProfile p =
        metrics::early_stopping_profile(data.y, data.x, ks, {1, 3});
    for (size_t mi = 0; mi < p.ms.size(); ++mi) {
        double best = std::numeric_limits<double>::infinity();
        for (int k : ks) {
            FactorFit f = esa::esa_fit(data.y, k, p.ms[mi]);
            best = std::min(best, metrics::err_x(f.xhat, data.x));
        }
        CHECK(p.err_x[mi] == doctest::Approx(best).epsilon(1e-10));
    }
    CHECK((p.m_opt == 1 || p.m_opt == 3));
}

TEST_CASE("early stopping profile validates the step grid") {
    Rng rng(29);
    DataMatrix y(gaussian(rng, 6, 8));
    Matrix x = Matrix::Zero(6, 8);
    CHECK_THROWS_AS(metrics::early_stopping_profile(y, x, {0, 1}, {0}), InvalidInputError);
    CHECK_THROWS_AS(metrics::early_stopping_profile(y, x, {0, 1}, {51}), InvalidInputError);
}

TEST_CASE("survival curve closed cases and counting oracle") {
    auto [t0, p0] = metrics::survival_curve({0.0, 0.0, 0.0}, {0.1, 0.5, 1.0});
    for (double p : p0) CHECK(p == 0.0);

    auto [t1, p1] = metrics::survival_curve({0.0, 1.0, 2.0}, {0.5});
    CHECK(p1[0] == doctest::Approx(2.0 / 3.0));

    Rng rng(31);
    std::uniform_real_distribution<double> un(0.0, 3.0);
    std::vector<double> rees;
    for (int i = 0; i < 57; ++i) rees.push_back(un(rng));
    std::vector<double> grid = metrics::default_survival_thresholds();
    auto [ts, props] = metrics::survival_curve(rees, grid);
    double prev = 1.0;
    for (size_t i = 0; i < ts.size(); ++i) {
        int count = 0;
        for (double r : rees) {
            if (r > ts[i]) ++count;
        }
        CHECK(props[i] == doctest::Approx(count / 57.0));
        CHECK(props[i] <= prev + 1e-12);  // nonincreasing
        CHECK(props[i] >= 0.0);
        CHECK(props[i] <= 1.0);
        prev = props[i];
    }

    CHECK_THROWS_AS(metrics::survival_curve({-0.5}, grid), InvalidInputError);
}
