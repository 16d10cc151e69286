#pragma once

#include "kdep/hsic.hpp"
#include "kdep/kernel.hpp"
#include "kdep/rff.hpp"
#include "kdep/types.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace kdep {

enum class NullKind { Permutation, GammaMomentMatched };

struct NullModel {
    NullKind kind = NullKind::Permutation;
    double a = 0.0;                 // gamma shape
    double b = 0.0;                 // gamma scale
    std::vector<double> samples;    // permutation draws
    int B = 0;
};

struct TestConfig {
    Method method = Method::HSIC;
    int permutations = 200;
    std::uint64_t seed = 0;
    Index D = 30;                   // RHSIC feature count
    // When true, frequency matrices are redrawn per permutation instead of
    // held fixed, so the null mixes permutation and feature randomness.
    bool redrawFrequencies = false;
};

namespace detail {

// Sub-stream indices off the root seed. 0/1 feed the observed statistic's
// frequency draws; permutation b uses kPermBase + b.
constexpr std::uint64_t kFreqX = 0;
constexpr std::uint64_t kFreqY = 1;
constexpr std::uint64_t kPermBase = 2;

inline std::vector<Index> random_permutation(Index n, std::uint64_t seed) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

inline FeatureMap permute_rows(const FeatureMap& Z, const std::vector<Index>& perm) {
    FeatureMap P = Z;
    for (Index i = 0; i < Z.cosPart.rows(); ++i) {
        P.cosPart.row(i) = Z.cosPart.row(perm[static_cast<std::size_t>(i)]);
        P.sinPart.row(i) = Z.sinPart.row(perm[static_cast<std::size_t>(i)]);
    }
    return P;
}

inline DataMatrix permute_rows(const DataMatrix& X, const std::vector<Index>& perm) {
    DataMatrix P(X.rows(), X.cols());
    for (Index i = 0; i < X.rows(); ++i) P.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
    return P;
}

}  // namespace detail

// B statistic values recomputed after independently permuting the rows of Y
// (X fixed). Deterministic given the seed; each permutation draws from its
// own seed sub-stream. For RHSIC the frequency matrices are drawn once and
// reused across permutations unless cfg.redrawFrequencies is set.
inline NullModel permutation_null(const DataMatrix& X, const DataMatrix& Y,
                                  const Bandwidth& sigmaX, const Bandwidth& sigmaY,
                                  const TestConfig& cfg) {
    if (cfg.permutations < 1)
        throw std::invalid_argument("permutation_null: need B >= 1");
    if (X.rows() != Y.rows())
        throw RowCountMismatch("permutation_null: X and Y must have the same number of rows");
    const Index n = X.rows();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);

    NullModel null;
    null.kind = NullKind::Permutation;
    null.B = cfg.permutations;
    null.samples.reserve(static_cast<std::size_t>(cfg.permutations));

    if (cfg.method == Method::HSIC) {
        const Matrix Kx = se_kernel_matrix(X, sigmaX).values;
        const Matrix Ly = center_gram(se_kernel_matrix(Y, sigmaY).values);
        for (int b = 0; b < cfg.permutations; ++b) {
            const auto perm = detail::random_permutation(
                n, substream_seed(cfg.seed, detail::kPermBase + static_cast<std::uint64_t>(b)));
            double sum = 0.0;
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < n; ++j)
                    sum += Kx(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]) * Ly(i, j);
            null.samples.push_back(sum / n2);
        }
    } else {
        const FrequencyMatrix Wx =
            sample_frequencies(X.cols(), cfg.D, sigmaX, substream_seed(cfg.seed, detail::kFreqX));
        const FrequencyMatrix Wy =
            sample_frequencies(Y.cols(), cfg.D, sigmaY, substream_seed(cfg.seed, detail::kFreqY));
        const FeatureMap Zx = center_features(feature_map(X, Wx));
        const FeatureMap Zy = center_features(feature_map(Y, Wy));
        for (int b = 0; b < cfg.permutations; ++b) {
            const std::uint64_t sub =
                substream_seed(cfg.seed, detail::kPermBase + static_cast<std::uint64_t>(b));
            const auto perm = detail::random_permutation(n, sub);
            if (cfg.redrawFrequencies) {
                const FrequencyMatrix WxB =
                    sample_frequencies(X.cols(), cfg.D, sigmaX, substream_seed(sub, detail::kFreqX));
                const FrequencyMatrix WyB =
                    sample_frequencies(Y.cols(), cfg.D, sigmaY, substream_seed(sub, detail::kFreqY));
                const FeatureMap ZxB = center_features(feature_map(X, WxB));
                const FeatureMap ZyB =
                    center_features(feature_map(detail::permute_rows(Y, perm), WyB));
                null.samples.push_back(rhsic(ZxB, ZyB).value);
            } else {
                // row permutation commutes with column-mean centering
                null.samples.push_back(rhsic(Zx, detail::permute_rows(Zy, perm)).value);
            }
        }
    }
    return null;
}

// Moment-matched gamma: a = m^2/v, b = v/m from the permutation draws.
inline NullModel gamma_null(const NullModel& permNull) {
    if (permNull.kind != NullKind::Permutation)
        throw std::invalid_argument("gamma_null: expects a permutation null model");
    const auto& s = permNull.samples;
    if (s.size() < 2)
        throw DegenerateNull("gamma_null: need at least two null draws");
    const double m = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double v = 0.0;
    for (double x : s) v += (x - m) * (x - m);
    v /= static_cast<double>(s.size() - 1);
    if (!(v > 0.0) || !(m > 0.0))
        throw DegenerateNull("gamma_null: degenerate null draws (zero variance or nonpositive mean)");
    NullModel g;
    g.kind = NullKind::GammaMomentMatched;
    g.a = m * m / v;
    g.b = v / m;
    g.B = permNull.B;
    return g;
}

inline double gamma_cdf(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(a, x / b);
}

// Threshold at level alpha. Permutation: the ceil((1-alpha)(B+1))-th order
// statistic of the draws. Gamma: inverse CDF at 1-alpha via a bracketed
// bisection on the regularized lower incomplete gamma (abs tol 1e-12).
inline double threshold(const NullModel& null, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("threshold: alpha must lie in (0, 1)");
    if (null.kind == NullKind::Permutation) {
        if (null.samples.empty())
            throw DegenerateNull("threshold: empty permutation null");
        std::vector<double> sorted = null.samples;
        std::sort(sorted.begin(), sorted.end());
        const auto B = static_cast<std::ptrdiff_t>(sorted.size());
        auto k = static_cast<std::ptrdiff_t>(
            std::ceil((1.0 - alpha) * static_cast<double>(B + 1)));
        k = std::clamp<std::ptrdiff_t>(k, 1, B);
        return sorted[static_cast<std::size_t>(k - 1)];
    }
    if (!(null.a > 0.0) || !(null.b > 0.0))
        throw DegenerateNull("threshold: gamma null has nonpositive parameters");
    const double target = 1.0 - alpha;
    double hi = null.a * null.b;  // start at the mean and expand
    while (gamma_cdf(hi, null.a, null.b) < target) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_cdf(mid, null.a, null.b) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Permutation: (1 + #{draws >= stat}) / (B + 1); gamma: upper tail.
inline double p_value(double statValue, const NullModel& null) {
    if (null.kind == NullKind::Permutation) {
        if (null.samples.empty())
            throw DegenerateNull("p_value: empty permutation null");
        const auto exceed = std::count_if(null.samples.begin(), null.samples.end(),
                                          [&](double s) { return s >= statValue; });
        return (1.0 + static_cast<double>(exceed)) /
               static_cast<double>(null.samples.size() + 1);
    }
    if (!(null.a > 0.0) || !(null.b > 0.0))
        throw DegenerateNull("p_value: gamma null has nonpositive parameters");
    return std::max(1.0 - gamma_cdf(statValue, null.a, null.b), 1e-300);
}

inline double p_value(const DependenceStatistic& stat, const NullModel& null) {
    return p_value(stat.value, null);
}

struct DependenceResult {
    DependenceStatistic statistic;
    double pValue = 1.0;
    double thresholdValue = 0.0;   // theta
    double alpha = 0.05;
    NullModel null;
    bool reject = false;           // statistic.value >= thresholdValue
};

// Full statistic + null + threshold + p-value pipeline.
inline DependenceResult independence_test(const DataMatrix& X, const DataMatrix& Y,
                                          const Bandwidth& sigmaX, const Bandwidth& sigmaY,
                                          const TestConfig& cfg, double alpha,
                                          NullKind inference = NullKind::Permutation) {
    DependenceResult result;
    if (cfg.method == Method::HSIC) {
        result.statistic = hsic(X, Y, sigmaX, sigmaY);
    } else {
        const FrequencyMatrix Wx =
            sample_frequencies(X.cols(), cfg.D, sigmaX, substream_seed(cfg.seed, detail::kFreqX));
        const FrequencyMatrix Wy =
            sample_frequencies(Y.cols(), cfg.D, sigmaY, substream_seed(cfg.seed, detail::kFreqY));
        result.statistic =
            rhsic(center_features(feature_map(X, Wx)), center_features(feature_map(Y, Wy)));
    }
    const NullModel perm = permutation_null(X, Y, sigmaX, sigmaY, cfg);
    result.null = (inference == NullKind::Permutation) ? perm : gamma_null(perm);
    result.alpha = alpha;
    result.thresholdValue = threshold(result.null, alpha);
    result.pValue = p_value(result.statistic, result.null);
    result.reject = result.statistic.value >= result.thresholdValue;
    return result;
}

// Two-sample Kolmogorov-Smirnov distance between empirical samples and a
// gamma CDF (used for the null-approximation quality checks).
inline double ks_distance_gamma(std::vector<double> samples, double a, double b) {
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = gamma_cdf(samples[i], a, b);
        ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return ks;
}

// KS distance between two empirical samples.
inline double ks_distance(std::vector<double> u, std::vector<double> v) {
    std::sort(u.begin(), u.end());
    std::sort(v.begin(), v.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < u.size() && j < v.size()) {
        if (u[i] <= v[j])
            ++i;
        else
            ++j;
        ks = std::max(ks, std::abs(static_cast<double>(i) / static_cast<double>(u.size()) -
                                   static_cast<double>(j) / static_cast<double>(v.size())));
    }
    return ks;
}

}  // namespace kdep
