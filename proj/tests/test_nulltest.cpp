#include "kdep/nulltest.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace kdep;
using kdep::test::random_matrix;
using kdep::test::random_uniform;

TEST_CASE("gamma moments from mean and variance") {
    NullModel perm;
    perm.kind = NullKind::Permutation;
    perm.samples = {2.0, 4.0, 6.0};   // mean 4, sample variance 4
    perm.B = 3;
    const NullModel g = gamma_null(perm);
    const double m = 4.0, v = 4.0;   // sample variance of {2,4,6}
    CHECK_THAT(g.a, Catch::Matchers::WithinAbs(m * m / v, 1e-12));
    CHECK_THAT(g.b, Catch::Matchers::WithinAbs(v / m, 1e-12));
    CHECK_THAT(g.a * g.b, Catch::Matchers::WithinAbs(m, 1e-10));
}

TEST_CASE("constant draws make the gamma fit degenerate") {
    NullModel perm;
    perm.samples = {0.5, 0.5, 0.5};
    perm.B = 3;
    CHECK_THROWS_AS(gamma_null(perm), DegenerateNull);
}

TEST_CASE("gamma fit recovers known parameters from synthetic draws") {
    std::mt19937_64 rng(99);
    std::gamma_distribution<double> gamma(2.0, 3.0);
    NullModel perm;
    perm.B = 100000;
    perm.samples.reserve(100000);
    for (int i = 0; i < 100000; ++i) perm.samples.push_back(gamma(rng));
    const NullModel g = gamma_null(perm);
    CHECK_THAT(g.a, Catch::Matchers::WithinRel(2.0, 0.05));
    CHECK_THAT(g.b, Catch::Matchers::WithinRel(3.0, 0.05));
}

TEST_CASE("permutation threshold is an order statistic") {
    NullModel perm;
    for (int i = 1; i <= 100; ++i) perm.samples.push_back(static_cast<double>(i));
    perm.B = 100;
    CHECK(threshold(perm, 0.05) == 96.0);
}

TEST_CASE("gamma threshold matches the exponential quantile") {
    NullModel g;
    g.kind = NullKind::GammaMomentMatched;
    g.a = 1.0;
    g.b = 1.0;
    CHECK_THAT(threshold(g, 0.05), Catch::Matchers::WithinAbs(-std::log(0.05), 1e-9));
}

TEST_CASE("permutation p-values use the +1 counting convention") {
    NullModel perm;
    for (int i = 0; i < 499; ++i) perm.samples.push_back(static_cast<double>(i) / 499.0);
    perm.B = 499;
    CHECK_THAT(p_value(2.0, perm), Catch::Matchers::WithinAbs(1.0 / 500.0, 1e-15));
    CHECK(p_value(-1.0, perm) == 1.0);
    CHECK(p_value(0.0, perm) <= 1.0);
}

TEST_CASE("p-value is nonincreasing in the statistic") {
    NullModel perm;
    std::mt19937_64 rng(5);
    std::gamma_distribution<double> gamma(2.0, 1.0);
    for (int i = 0; i < 200; ++i) perm.samples.push_back(gamma(rng));
    perm.B = 200;
    const NullModel g = gamma_null(perm);
    double prevP = 1.0, prevG = 1.0;
    for (double stat = 0.0; stat < 10.0; stat += 0.25) {
        const double pp = p_value(stat, perm);
        const double pg = p_value(stat, g);
        CHECK(pp <= prevP);
        CHECK(pg <= prevG);
        prevP = pp;
        prevG = pg;
    }
}

TEST_CASE("permutation null of a constant variable is all zeros") {
    const Matrix X = random_matrix(20, 1, 1);
    const Matrix Y = Matrix::Constant(20, 1, 1.0);
    TestConfig cfg;
    cfg.permutations = 10;
    const NullModel null = permutation_null(X, Y, fixed_bandwidth(1.0), fixed_bandwidth(1.0), cfg);
    for (double v : null.samples) CHECK(v == 0.0);
}

TEST_CASE("null draws break the dependence of y = x") {
    const Index n = 50;
    int distinct = 0;
    for (int t = 0; t < 100; ++t) {
        const Matrix x = random_matrix(n, 1, 9000 + t);
        const Bandwidth s = bandwidth_heuristic(x);
        const double observed = hsic(x, x, s, s).value;
        TestConfig cfg;
        cfg.permutations = 1;
        cfg.seed = static_cast<std::uint64_t>(t);
        const NullModel null = permutation_null(x, x, s, s, cfg);
        if (null.samples[0] < observed) ++distinct;
    }
    CHECK(distinct >= 99);
}

TEST_CASE("permutation null mean matches the redraw oracle for independent data") {
    const Index n = 100;
    const Bandwidth s = fixed_bandwidth(1.0);
    std::vector<double> redraws;
    for (int t = 0; t < 500; ++t)
        redraws.push_back(
            hsic(random_matrix(n, 1, 100 + t), random_matrix(n, 1, 7100 + t), s, s).value);
    const double redrawMean =
        std::accumulate(redraws.begin(), redraws.end(), 0.0) / redraws.size();

    TestConfig cfg;
    cfg.permutations = 500;
    cfg.seed = 77;
    const NullModel null =
        permutation_null(random_matrix(n, 1, 55), random_matrix(n, 1, 56), s, s, cfg);
    const double nullMean =
        std::accumulate(null.samples.begin(), null.samples.end(), 0.0) / null.samples.size();
    CHECK(std::abs(nullMean - redrawMean) / redrawMean < 0.2);
}

TEST_CASE("rhsic permutation null approaches the hsic null as D grows") {
    const Index n = 100;
    const int B = 100;
    const std::vector<Index> grid{4, 16, 64, 256};
    std::vector<double> medianKs;
    for (Index D : grid) {
        std::vector<double> ks;
        for (std::uint64_t seedIdx = 0; seedIdx < 10; ++seedIdx) {
            const Matrix x = random_uniform(n, 1, 300 + seedIdx);
            const Matrix y = random_uniform(n, 1, 400 + seedIdx);
            const Bandwidth sx = bandwidth_heuristic(x);
            const Bandwidth sy = bandwidth_heuristic(y);
            TestConfig hsicCfg;
            hsicCfg.method = Method::HSIC;
            hsicCfg.permutations = B;
            hsicCfg.seed = seedIdx;
            TestConfig rhsicCfg = hsicCfg;
            rhsicCfg.method = Method::RHSIC;
            rhsicCfg.D = D;
            const NullModel hs = permutation_null(x, y, sx, sy, hsicCfg);
            const NullModel rs = permutation_null(x, y, sx, sy, rhsicCfg);
            ks.push_back(ks_distance(hs.samples, rs.samples));
        }
        std::sort(ks.begin(), ks.end());
        medianKs.push_back(ks[ks.size() / 2]);
    }
    for (std::size_t i = 1; i < medianKs.size(); ++i)
        CHECK(medianKs[i] <= medianKs[i - 1] + 0.05);   // nonincreasing up to MC noise
    CHECK(medianKs.back() < medianKs.front());
}

TEST_CASE("independence_test wires the pipeline together") {
    const Index n = 60;
    const Matrix x = random_matrix(n, 1, 61);
    const Matrix y = 2.0 * x;   // perfectly dependent
    const Bandwidth sx = bandwidth_heuristic(x);
    const Bandwidth sy = bandwidth_heuristic(y);
    TestConfig cfg;
    cfg.permutations = 199;
    cfg.seed = 123;
    const DependenceResult r = independence_test(x, y, sx, sy, cfg, 0.05);
    CHECK(r.reject);
    CHECK(r.pValue <= 0.05);
    CHECK(r.statistic.value >= r.thresholdValue);

    const DependenceResult g =
        independence_test(x, y, sx, sy, cfg, 0.05, NullKind::GammaMomentMatched);
    CHECK(g.reject);
    CHECK((g.pValue <= g.alpha) == g.reject);
}
