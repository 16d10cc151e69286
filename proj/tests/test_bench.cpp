#include "kdep/bench.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace kdep;
using kdep::test::random_matrix;

TEST_CASE("rate fit on synthetic exact rates") {
    const std::vector<double> grid{16, 64, 256, 1024};
    std::vector<double> errors;
    for (double D : grid) errors.push_back(3.7 / std::sqrt(D));
    const RateFit fit = fit_rate(grid, errors);
    CHECK_THAT(fit.slope, Catch::Matchers::WithinAbs(-0.5, 1e-10));

    const std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
    CHECK_THAT(fit_rate(grid, flat).slope, Catch::Matchers::WithinAbs(0.0, 1e-12));

    CHECK_THROWS_AS(fit_rate(grid, std::vector<double>{1.0, 0.0, 1.0, 1.0}), NonPositiveError);
    CHECK_THROWS_AS(fit_rate({1.0, 2.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("spectral norm agrees with the SVD") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Matrix E = random_matrix(12, 12, seed);
        Eigen::JacobiSVD<Matrix> svd(E);
        CHECK_THAT(spectral_norm(E),
                   Catch::Matchers::WithinRel(svd.singularValues()(0), 1e-6));
    }
}

TEST_CASE("product error vanishes for very large D") {
    const Matrix X = random_matrix(10, 1, 4);
    const Matrix Y = random_matrix(10, 1, 5);
    const Bandwidth sx = bandwidth_heuristic(X);
    const Bandwidth sy = bandwidth_heuristic(Y);
    const double err = product_error(X, Y, sx, sy, 1 << 15, 6);
    const Matrix Kx = center_gram(se_kernel_matrix(X, sx).values);
    const Matrix Ky = center_gram(se_kernel_matrix(Y, sy).values);
    CHECK(err < 0.05 * spectral_norm(Kx * Ky));
}

TEST_CASE("self-case product error is nonnegative") {
    const Matrix X = random_matrix(8, 1, 7);
    const Bandwidth s = bandwidth_heuristic(X);
    CHECK(product_error(X, X, s, s, 64, 8) >= 0.0);
}

TEST_CASE("a single product error sits below the expectation bound") {
    const Matrix X = random_matrix(30, 1, 9);
    const Matrix Y = random_matrix(30, 1, 10);
    const Bandwidth sx = bandwidth_heuristic(X);
    const Bandwidth sy = bandwidth_heuristic(Y);
    CHECK(product_error(X, Y, sx, sy, 64, 11) < product_error_bound(30, 64));
}

TEST_CASE("bench row smoke") {
    const BenchRow row = bench_row(100, 30, 12);
    CHECK(row.n == 100);
    CHECK(row.D == 30);
    CHECK(std::isfinite(row.hsicValue));
    CHECK(std::isfinite(row.rhsicValue));
    CHECK(std::isfinite(row.hsicMs));
    CHECK(std::isfinite(row.rhsicMs));
    CHECK(std::isfinite(row.rhsicAbsError));
    CHECK(std::isfinite(row.sensFrobError));

    // past the exact cap the hsic columns are left unset
    const BenchRow big = bench_row(300, 8, 13, /*maxExact=*/200);
    CHECK(std::isfinite(big.rhsicValue));
    CHECK(!std::isfinite(big.hsicValue));
}
