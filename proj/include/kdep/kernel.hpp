#pragma once

#include "kdep/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace kdep {

// n x n symmetric SE Gram matrix with the bandwidth it was built from.
// Diagonal entries are exactly 1; off-diagonal entries lie in (0, 1].
struct GramMatrix {
    Matrix values;
    Bandwidth bandwidth;
};

// Squared pairwise Euclidean distances via the expanded form
// ||x||^2 + ||x'||^2 - 2 x'x, clamped at 0 against negative round-off.
inline Matrix pairwise_squared_distances(const DataMatrix& X) {
    require_finite(X, "pairwise_squared_distances");
    const Index n = X.rows();
    const Vector sq = X.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * X * X.transpose()).eval();
    d2.colwise() += sq;
    d2.rowwise() += sq.transpose();
    d2 = d2.cwiseMax(0.0);
    d2.diagonal().setZero();
    return d2;
}

// Mean (or median) of the n(n-1)/2 pairwise Euclidean distances.
// Throws AllSamplesIdentical when every pairwise distance is zero.
inline Bandwidth bandwidth_heuristic(const DataMatrix& X,
                                     BandwidthHeuristic heuristic = BandwidthHeuristic::MeanDistance) {
    if (X.rows() < 2)
        throw ShapeMismatch("bandwidth_heuristic: need at least two samples");
    if (heuristic == BandwidthHeuristic::Fixed)
        throw std::invalid_argument("bandwidth_heuristic: Fixed needs an explicit sigma");

    const Matrix d2 = pairwise_squared_distances(X);
    const Index n = X.rows();
    double sigma = 0.0;
    if (heuristic == BandwidthHeuristic::MeanDistance) {
        double sum = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) sum += std::sqrt(d2(i, j));
        sigma = sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
    } else {
        std::vector<double> dist;
        dist.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j) dist.push_back(std::sqrt(d2(i, j)));
        const std::size_t mid = dist.size() / 2;
        std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
        sigma = dist[mid];
        if (dist.size() % 2 == 0) {
            const double lower = *std::max_element(dist.begin(), dist.begin() + mid);
            sigma = 0.5 * (sigma + lower);
        }
    }
    if (sigma <= 0.0)
        throw AllSamplesIdentical("bandwidth_heuristic: all pairwise distances are zero");
    return Bandwidth{sigma, heuristic};
}

inline Bandwidth fixed_bandwidth(double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("fixed_bandwidth: sigma must be positive");
    return Bandwidth{sigma, BandwidthHeuristic::Fixed};
}

// K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)). Upper triangle is computed
// and mirrored, so the result is symmetric to the bit.
inline GramMatrix se_kernel_matrix(const DataMatrix& X, const Bandwidth& sigma) {
    if (!(sigma.sigma > 0.0))
        throw std::invalid_argument("se_kernel_matrix: sigma must be positive");
    const Matrix d2 = pairwise_squared_distances(X);
    const Index n = X.rows();
    const double inv = -1.0 / (2.0 * sigma.sigma * sigma.sigma);
    Matrix K(n, n);
    for (Index i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (Index j = i + 1; j < n; ++j) {
            const double v = std::exp(inv * d2(i, j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return GramMatrix{std::move(K), sigma};
}

// H K H computed as K - row-means - col-means + grand-mean (O(n^2)).
inline Matrix center_gram(const Matrix& K) {
    if (K.rows() != K.cols())
        throw ShapeMismatch("center_gram: matrix must be square");
    const Vector rowMean = K.rowwise().mean();
    const Vector colMean = K.colwise().mean();
    const double grandMean = K.mean();
    Matrix C = K;
    C.colwise() -= rowMean;
    C.rowwise() -= colMean.transpose();
    C.array() += grandMean;
    return C;
}

inline GramMatrix center_gram(const GramMatrix& K) {
    return GramMatrix{center_gram(K.values), K.bandwidth};
}

}  // namespace kdep
