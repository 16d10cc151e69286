#pragma once

#include "kdep/hsic.hpp"
#include "kdep/kernel.hpp"
#include "kdep/rff.hpp"
#include "kdep/sensmap.hpp"
#include "kdep/types.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace kdep {

// Largest singular value by power iteration on E'E, relative tolerance on
// the iterate change. Deterministic start vector.
inline double spectral_norm(const Matrix& E, double tol = 1e-8, int maxIter = 10000) {
    if (E.size() == 0) return 0.0;
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(E.cols());
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < maxIter; ++it) {
        const Vector Ev = E * v;
        const double next = Ev.norm();
        if (next == 0.0) return 0.0;
        Vector w = E.transpose() * Ev;
        w /= w.norm();
        if (std::abs(next - sigma) <= tol * std::max(next, 1.0)) return next;
        sigma = next;
        v = w;
    }
    throw PowerIterationNoConvergence("spectral_norm: no convergence within iteration cap");
}

// Spectral norm of Kx^ Ky^ - Kx Ky with centered Grams and centered feature
// maps, D features per variable. Test-scale only (materializes n x n).
inline double product_error(const DataMatrix& X, const DataMatrix& Y, const Bandwidth& sigmaX,
                            const Bandwidth& sigmaY, Index D, std::uint64_t seed) {
    const Matrix Kx = center_gram(se_kernel_matrix(X, sigmaX).values);
    const Matrix Ky = center_gram(se_kernel_matrix(Y, sigmaY).values);
    const FeatureMap Zx =
        center_features(feature_map(X, sample_frequencies(X.cols(), D, sigmaX, substream_seed(seed, 0))));
    const FeatureMap Zy =
        center_features(feature_map(Y, sample_frequencies(Y.cols(), D, sigmaY, substream_seed(seed, 1))));
    const Matrix E = approx_gram(Zx) * approx_gram(Zy) - Kx * Ky;
    return spectral_norm(E);
}

// sqrt(3 n^4 log(n) / D) + 2 n^2 log(n) / D, the expected-error bound on the
// kernel-product approximation. Raw (unnormalized) scale.
inline double product_error_bound(Index n, Index D) {
    const double nn = static_cast<double>(n);
    const double logn = std::log(nn);
    const double Dd = static_cast<double>(D);
    return std::sqrt(3.0 * nn * nn * nn * nn * logn / Dd) + 2.0 * nn * nn * logn / Dd;
}

struct RateFit {
    std::vector<double> gridD;
    std::vector<double> errors;
    double slope = 0.0;       // least-squares slope of log error vs log D
    double intercept = 0.0;
};

// Ordinary least squares on (log D, log error).
inline RateFit fit_rate(const std::vector<double>& gridD, const std::vector<double>& errors) {
    if (gridD.size() < 3 || gridD.size() != errors.size())
        throw std::invalid_argument("fit_rate: need >= 3 matching grid points");
    for (std::size_t i = 1; i < gridD.size(); ++i)
        if (!(gridD[i] > gridD[i - 1]))
            throw std::invalid_argument("fit_rate: grid must be strictly increasing");
    for (double e : errors)
        if (!(e > 0.0)) throw NonPositiveError("fit_rate: errors must be positive");

    const auto m = static_cast<double>(gridD.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < gridD.size(); ++i) {
        const double lx = std::log(gridD[i]);
        const double ly = std::log(errors[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    RateFit fit;
    fit.gridD = gridD;
    fit.errors = errors;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

struct BenchRow {
    Index n = 0;
    Index D = 0;
    double hsicValue = std::numeric_limits<double>::quiet_NaN();
    double rhsicValue = 0.0;
    double hsicMs = std::numeric_limits<double>::quiet_NaN();
    double rhsicMs = 0.0;
    double rhsicAbsError = std::numeric_limits<double>::quiet_NaN();
    double sensFrobError = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

// One convergence/runtime measurement on i.i.d. uniform 1-D pairs. The exact
// HSIC path (value, time, sensitivity error) is skipped when n > maxExact,
// since it materializes n x n matrices.
inline BenchRow bench_row(Index n, Index D, std::uint64_t seed, Index maxExact = 8192) {
    std::mt19937_64 rng(substream_seed(seed, 0xbe));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    DataMatrix X(n, 1), Y(n, 1);
    for (Index i = 0; i < n; ++i) {
        X(i, 0) = uni(rng);
        Y(i, 0) = uni(rng);
    }
    // heuristic on a deterministic subsample to keep large n tractable
    const Index m = std::min<Index>(n, 2000);
    const Bandwidth sx = bandwidth_heuristic(X.topRows(m));
    const Bandwidth sy = bandwidth_heuristic(Y.topRows(m));

    BenchRow row;
    row.n = n;
    row.D = D;

    const auto t0 = std::chrono::steady_clock::now();
    const FrequencyMatrix Wx = sample_frequencies(1, D, sx, substream_seed(seed, 0));
    const FrequencyMatrix Wy = sample_frequencies(1, D, sy, substream_seed(seed, 1));
    const FeatureMap Zx = center_features(feature_map(X, Wx));
    const FeatureMap Zy = center_features(feature_map(Y, Wy));
    row.rhsicValue = rhsic(Zx, Zy).value;
    row.rhsicMs = detail::elapsed_ms(t0);

    if (n <= maxExact) {
        const auto t1 = std::chrono::steady_clock::now();
        row.hsicValue = hsic(X, Y, sx, sy).value;
        row.hsicMs = detail::elapsed_ms(t1);
        row.rhsicAbsError = std::abs(row.rhsicValue - row.hsicValue);
        const SensitivityMap exact = hsic_sensitivity(X, Y, sx, sy);
        const SensitivityMap approx = rhsic_sensitivity(X, Y, Zx, Zy);
        row.sensFrobError = std::sqrt((exact.Sx - approx.Sx).squaredNorm() +
                                      (exact.Sy - approx.Sy).squaredNorm());
    }
    return row;
}

}  // namespace kdep
