#include <doctest.h>

#include <cmath>
#include <set>

#include "bcvrank/bcv.hpp"
#include "bcvrank/simgen.hpp"
#include "test_util.hpp"

using namespace bcvrank;
using testutil::gaussian;

TEST_CASE("holdout fraction at the benchmark aspect ratios") {
    auto [rho1, bar1] = bcv::holdout_fraction(1.0);
    CHECK(bar1 == doctest::Approx(1.0));
    CHECK(rho1 == doctest::Approx(2.0 / 9.0).epsilon(1e-12));  // ~22%

    auto [rho50, bar50] = bcv::holdout_fraction(50.0);
    CHECK(rho50 == doctest::Approx(0.0346).epsilon(0.01));  // ~3.5%

    auto [rho_inv, bar_inv] = bcv::holdout_fraction(1.0 / 50.0);
    CHECK(rho_inv == doctest::Approx(rho50).epsilon(1e-12));
    CHECK(bar_inv == doctest::Approx(bar50).epsilon(1e-12));

    CHECK_THROWS_AS(bcv::holdout_fraction(0.0), InvalidInputError);
    CHECK_THROWS_AS(bcv::holdout_fraction(-2.0), InvalidInputError);
}

TEST_CASE("partition sizes follow the area rule") {
    // square case: rho = 2/9, area 2222.2, side 47.1
    auto [r0, c0] = bcv::partition_sizes(100, 100);
    CHECK(r0 == 53);
    CHECK(c0 == 53);

    // extreme aspect ratio: the column side caps at n - 1 and the row side
    // re-balances to keep the held-in area
    auto [r1, c1] = bcv::partition_sizes(5000, 100);
    CHECK(c1 == 1);
    CHECK(r1 == 5000 - 175);

    // squareness at equal dims
    for (Index n : {50, 200, 500}) {
        auto [rr, cc] = bcv::partition_sizes(n, n);
        CHECK(std::abs((n - rr) - (n - cc)) <= 1);
    }
}

TEST_CASE("sample_partition basics") {
    Rng rng(5);
    HoldoutPlan plan = bcv::sample_partition(rng, 6, 7, 4, 5);
    CHECK(plan.rows_out.size() == 4);
    CHECK(plan.cols_out.size() == 5);
    std::set<Index> rows(plan.rows_out.begin(), plan.rows_out.end());
    CHECK(rows.size() == 4);  // duplicate free
    for (Index r : rows) CHECK(r < 6);

    // different seeds give different plans (10 draws)
    int distinct = 0;
    for (int s = 0; s < 10; ++s) {
        Rng a(static_cast<std::uint64_t>(s)), b(static_cast<std::uint64_t>(s + 1000));
        auto pa = bcv::sample_partition(a, 30, 30, 15, 15);
        auto pb = bcv::sample_partition(b, 30, 30, 15, 15);
        if (pa.rows_out != pb.rows_out || pa.cols_out != pb.cols_out) ++distinct;
    }
    CHECK(distinct == 10);
}

TEST_CASE("sample_partition row inclusion is uniform") {
    // binomial oracle: inclusion frequency of each row ~ N0/N within 4 sd
    const Index n_rows = 12, n0 = 5;
    const int draws = 2000;
    Rng rng(99);
    std::vector<int> hits(n_rows, 0);
    for (int d = 0; d < draws; ++d) {
        HoldoutPlan plan = bcv::sample_partition(rng, n_rows, 10, n0, 3);
        for (Index r : plan.rows_out) ++hits[static_cast<size_t>(r)];
    }
    const double p = static_cast<double>(n0) / n_rows;
    const double tol = 4.0 * std::sqrt(p * (1.0 - p) / draws);
    for (Index i = 0; i < n_rows; ++i) {
        CHECK(std::abs(hits[static_cast<size_t>(i)] / double(draws) - p) < tol);
    }
}

TEST_CASE("predict_heldout closed cases") {
    Rng rng(7);
    Matrix y01 = gaussian(rng, 3, 8);
    Matrix y10 = gaussian(rng, 8, 4);
    Matrix x11 = gaussian(rng, 8, 8);
    DiagonalVariances unit(Vector::Ones(8));

    Matrix zero = bcv::predict_heldout(y01, y10, x11, unit, 0);
    CHECK(zero.rows() == 3);
    CHECK(zero.cols() == 4);
    CHECK(zero.norm() == 0.0);
}

TEST_CASE("noiseless holdout prediction recovers the block exactly") {
    Rng rng(11);
    Matrix l = gaussian(rng, 20, 3);
    Matrix r = gaussian(rng, 3, 24);
    Matrix x = l * r;  // rank 3, no noise
    const Index r0 = 6, c0 = 7;
    Matrix y00 = x.topLeftCorner(r0, c0);
    Matrix y01 = x.topRightCorner(r0, 24 - c0);
    Matrix y10 = x.bottomLeftCorner(20 - r0, c0);
    Matrix y11 = x.bottomRightCorner(20 - r0, 24 - c0);
    DiagonalVariances unit(Vector::Ones(20 - r0));
    Matrix pred = bcv::predict_heldout(y01, y10, y11, unit, 3);
    CHECK((pred - y00).norm() <= 1e-8 * y00.norm());
}

TEST_CASE("holdout prediction is decomposition independent") {
    Rng rng(13);
    Matrix l1 = gaussian(rng, 10, 3);
    Matrix r1 = gaussian(rng, 3, 12);
    Matrix x11 = l1 * r1;
    Matrix y01 = gaussian(rng, 5, 12);
    Matrix y10 = gaussian(rng, 10, 6);
    Vector s2 = Vector::LinSpaced(10, 0.5, 2.0);
    DiagonalVariances sig(s2);

    Matrix direct = bcv::predict_heldout(y01, y10, x11, sig, 3);

    // refactor X11 = (L A)(A^-1 R) for a random invertible A and rebuild
    Matrix a = gaussian(rng, 3, 3) + 3.0 * Matrix::Identity(3, 3);
    Matrix x11_re = (l1 * a) * (a.inverse() * r1);
    Matrix other = bcv::predict_heldout(y01, y10, x11_re, sig, 3);
    CHECK((direct - other).norm() <= 1e-8 * (1.0 + direct.norm()));
}

TEST_CASE("predict_heldout rejects rank-deficient fits") {
    Rng rng(17);
    Matrix l = gaussian(rng, 8, 2);
    Matrix r = gaussian(rng, 2, 9);
    Matrix x11 = l * r;  // rank 2
    Matrix y01 = gaussian(rng, 3, 9);
    Matrix y10 = gaussian(rng, 8, 3);
    DiagonalVariances unit(Vector::Ones(8));
    CHECK_THROWS_AS(bcv::predict_heldout(y01, y10, x11, unit, 4), DegenerateFitError);
}

TEST_CASE("variance guard logic") {
    CHECK_FALSE(bcv::variance_guard(Vector::Ones(10)));
    CHECK_FALSE(bcv::variance_guard(Vector::Constant(10, 3.5e-8)));  // scale free

    Vector v = Vector::Constant(10, 1e-13);
    v(0) = 1.0;  // geometric mean 1e-11.7 < 1e-6 * max
    CHECK(bcv::variance_guard(v));

    Vector with_zero = Vector::Ones(4);
    with_zero(2) = 0.0;
    CHECK(bcv::variance_guard(with_zero));
}

TEST_CASE("bcv selects rank 0 on pure white noise") {
    std::vector<int> ks{0, 1, 2, 3, 4, 5, 6, 7, 8};
    int zeros = 0;
    const int runs = 10;
    for (int run = 0; run < runs; ++run) {
        GeneratedDataset data = simgen::generate_white_noise(
            static_cast<std::uint64_t>(500 + run), 60, 60, NoiseSpec{0.0});
        Rng rng(static_cast<std::uint64_t>(run));
        bcv::BcvOptions opts;
        opts.reps = 20;
        BcvCurve curve = bcv::bcv_select(data.y, ks, rng, opts);
        if (curve.khat == 0) ++zeros;
        // selection is the argmin over evaluated ranks
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < curve.pe_mean.size(); ++j) {
            if (!std::isnan(curve.pe_mean(j))) best = std::min(best, curve.pe_mean(j));
        }
        for (size_t j = 0; j < curve.ks.size(); ++j) {
            if (curve.ks[j] == curve.khat) {
                CHECK(curve.pe_mean(static_cast<Index>(j)) == doctest::Approx(best));
            }
        }
    }
    CHECK(zeros >= 8);
}

TEST_CASE("bcv finds a single strong factor") {
    std::vector<int> ks{0, 1, 2, 3, 4};
    int ones = 0;
    const int runs = 20;
    for (int run = 0; run < runs; ++run) {
        // single factor at d^2 = 1.5 N, white noise
        ScenarioSpec spec{1, 0, 0, 0};
        GeneratedDataset data = simgen::generate_dataset(
            static_cast<std::uint64_t>(9000 + run), spec, 40, 40, NoiseSpec{0.0});
        Rng rng(static_cast<std::uint64_t>(run));
        bcv::BcvOptions opts;
        opts.reps = 20;
        if (bcv::bcv_select(data.y, ks, rng, opts).khat == 1) ++ones;
    }
    CHECK(ones >= 18);
}

TEST_CASE("bcv holdout error at k = 0 estimates the noise floor") {
    // E[PE(0)] = |X00|^2/(n0 N0) + mean sigma^2 = 1 for white noise
    double total = 0.0;
    const int runs = 30;
    for (int run = 0; run < runs; ++run) {
        GeneratedDataset data = simgen::generate_white_noise(
            static_cast<std::uint64_t>(4000 + run), 40, 40, NoiseSpec{0.0});
        Rng rng(static_cast<std::uint64_t>(run));
        bcv::BcvOptions opts;
        opts.reps = 5;
        BcvCurve curve = bcv::bcv_select(data.y, {0, 1}, rng, opts);
        total += curve.pe_mean(0);
    }
    CHECK(total / runs == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("bcv is deterministic given a seed") {
    GeneratedDataset data =
        simgen::generate_dataset(321, ScenarioSpec{1, 1, 0, 0}, 30, 30, NoiseSpec{1.0});
    std::vector<int> ks{0, 1, 2, 3};
    Rng a(5), b(5);
    bcv::BcvOptions opts;
    opts.reps = 8;
    BcvCurve ca = bcv::bcv_select(data.y, ks, a, opts);
    BcvCurve cb = bcv::bcv_select(data.y, ks, b, opts);
    CHECK(ca.khat == cb.khat);
    CHECK((ca.pe - cb.pe).norm() == 0.0);
}

TEST_CASE("bcv default rank grid respects the held-in block") {
    std::vector<int> ks = bcv::default_k_grid(100, 100);
    CHECK(ks.front() == 0);
    CHECK(ks.back() == 16);
    std::vector<int> small = bcv::default_k_grid(12, 12);
    CHECK(small.back() < 12);
}
