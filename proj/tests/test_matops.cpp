#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "bcvrank/matops.hpp"
#include "test_util.hpp"

using namespace bcvrank;
using testutil::gaussian;

TEST_CASE("svd of a diagonal matrix") {
    Matrix a = Vector{{3.0, 2.0, 1.0}}.asDiagonal();
    TruncatedSvd s = matops::svd(a);
    CHECK(s.d(0) == doctest::Approx(3.0));
    CHECK(s.d(1) == doctest::Approx(2.0));
    CHECK(s.d(2) == doctest::Approx(1.0));
    // identity up to column signs; the sign convention makes it exactly I
    CHECK((s.u - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((s.v - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("svd of the zero matrix") {
    TruncatedSvd s = matops::svd(Matrix::Zero(4, 3));
    CHECK(s.d.size() == 3);
    CHECK(s.d.maxCoeff() == 0.0);
    CHECK(s.reconstruct().norm() == 0.0);
}

TEST_CASE("svd reconstruction and orthonormality on random input") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a = gaussian(rng, 6, 4);
        TruncatedSvd s = matops::svd(a);
        CHECK((a - s.reconstruct()).norm() <= 1e-10 * a.norm());
        CHECK((s.u.transpose() * s.u - Matrix::Identity(4, 4)).norm() < 1e-10);
        CHECK((s.v.transpose() * s.v - Matrix::Identity(4, 4)).norm() < 1e-10);
        for (Index i = 0; i + 1 < s.d.size(); ++i) CHECK(s.d(i) >= s.d(i + 1));
    }
}

TEST_CASE("svd rejects non-finite input") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = std::nan("");
    CHECK_THROWS_AS(matops::svd(a), InvalidInputError);
}

TEST_CASE("truncate keeps the top triples") {
    Matrix a = Vector{{3.0, 2.0, 1.0}}.asDiagonal();
    TruncatedSvd s = matops::svd(a);
    Matrix r2 = matops::truncate(s, 2).reconstruct();
    Matrix expect = Vector{{3.0, 2.0, 0.0}}.asDiagonal();
    CHECK((r2 - expect).norm() < 1e-12);
    CHECK(matops::truncate(s, 0).reconstruct().norm() == 0.0);
    CHECK_THROWS_AS(matops::truncate(s, 4), InvalidRankError);
    CHECK_THROWS_AS(matops::truncate(s, -1), InvalidRankError);
}

TEST_CASE("truncation error matches the discarded spectrum (Eckart-Young)") {
    Rng rng(11);
    Matrix a = gaussian(rng, 6, 4);
    TruncatedSvd full = matops::svd(a);
    Matrix r = matops::truncate(full, 2).reconstruct();
    const double expected = full.d(2) * full.d(2) + full.d(3) * full.d(3);
    CHECK((a - r).squaredNorm() == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("truncation error is nonincreasing in k") {
    Rng rng(13);
    Matrix a = gaussian(rng, 8, 5);
    TruncatedSvd full = matops::svd(a);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= full.rank(); ++k) {
        const double err = (a - matops::truncate(full, k).reconstruct()).norm();
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
}

TEST_CASE("pinv_factored on hand examples") {
    // rank-1 all ones: pinv has constant entries 1/4
    Matrix l(2, 1), r(1, 2);
    l << 1, 1;
    r << 1, 1;
    Matrix p = matops::pinv_factored(l, r);
    CHECK(p.rows() == 2);
    CHECK((p - Matrix::Constant(2, 2, 0.25)).norm() < 1e-12);

    Matrix d = Vector{{2.0, 4.0}}.asDiagonal();
    Matrix p2 = matops::pinv_factored(Matrix::Identity(2, 2), d);
    Matrix expect = Vector{{0.5, 0.25}}.asDiagonal();
    CHECK((p2 - expect).norm() < 1e-12);
}

TEST_CASE("pinv_factored matches the SVD pseudo-inverse") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix l = gaussian(rng, 8, 3);
        Matrix r = gaussian(rng, 3, 5);
        Matrix x = l * r;
        Matrix p = matops::pinv_factored(l, r);

        Eigen::BDCSVD<Matrix> dec(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Matrix pinv = dec.matrixV() *
                      dec.singularValues().head(3).cwiseInverse().asDiagonal() *
                      dec.matrixU().leftCols(3).transpose();
        CHECK((p - pinv).norm() <= 1e-10 * pinv.norm());

        // Penrose identity X+ X X+ = X+
        CHECK((p * x * p - p).norm() <= 1e-9 * p.norm());
    }
}

TEST_CASE("pinv_factored rejects rank-deficient factors") {
    Matrix l(3, 2);
    l << 1, 2, 2, 4, 3, 6;  // rank 1
    Matrix r = Matrix::Identity(2, 4);
    CHECK_THROWS_AS(matops::pinv_factored(l, r), DegenerateFactorizationError);
}

TEST_CASE("stiefel frames are orthonormal and reproducible") {
    Rng rng(23);
    Matrix q = matops::stiefel_uniform(rng, 3, 3);
    CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() < 1e-10);

    Rng a(99), b(99);
    Matrix qa = matops::stiefel_uniform(a, 5, 2);
    Matrix qb = matops::stiefel_uniform(b, 5, 2);
    CHECK((qa - qb).norm() == 0.0);

    Rng c(123);
    CHECK_THROWS_AS(matops::stiefel_uniform(c, 3, 4), InvalidRankError);
}

TEST_CASE("stiefel sampling is symmetric about zero") {
    // Monte-Carlo check of rotation invariance: the first coordinate of a
    // Haar unit vector has mean 0 and variance 1/N.
    Rng rng(31);
    const int draws = 2000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        sum += matops::stiefel_uniform(rng, 50, 1)(0, 0);
    }
    CHECK(std::abs(sum / draws) < 4.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("sample spectrum preserves total energy") {
    Rng rng(37);
    DataMatrix y(gaussian(rng, 6, 9));
    SampleSpectrum spec = matops::sample_spectrum(y);
    const double energy = 9.0 * spec.lambdas.array().square().sum();
    CHECK(energy == doctest::Approx(y.values().squaredNorm()).epsilon(1e-8));
    for (Index i = 0; i + 1 < spec.lambdas.size(); ++i) {
        CHECK(spec.lambdas(i) >= spec.lambdas(i + 1));
    }
}

TEST_CASE("fast rank-k truncation agrees with the SVD route") {
    Rng rng(41);
    for (auto [rows, cols] : {std::pair<Index, Index>{12, 30}, {30, 12}, {15, 15}}) {
        Matrix a = gaussian(rng, rows, cols);
        TruncatedSvd full = matops::svd(a);
        for (int k : {0, 1, 3, 7}) {
            Matrix fast = matops::truncate_to_rank(a, k);
            Matrix slow = matops::truncate(full, k).reconstruct();
            CHECK((fast - slow).norm() <= 1e-9 * (1.0 + slow.norm()));
        }
    }
}

TEST_CASE("fast rank-k svd factors reproduce the truncation") {
    Rng rng(43);
    Matrix a = gaussian(rng, 10, 14);
    TruncatedSvd fast = matops::rank_k_svd(a, 4);
    TruncatedSvd slow = matops::truncate(matops::svd(a), 4);
    CHECK((fast.d - slow.d).norm() <= 1e-9 * slow.d.norm());
    CHECK((fast.reconstruct() - slow.reconstruct()).norm() <=
          1e-9 * (1.0 + slow.reconstruct().norm()));
}

TEST_CASE("DataMatrix validates its invariants") {
    Matrix one_row = Matrix::Zero(1, 5);
    CHECK_THROWS_AS(DataMatrix{one_row}, InvalidInputError);
    Matrix bad = Matrix::Zero(3, 3);
    bad(2, 2) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DataMatrix{bad}, InvalidInputError);
}
