#pragma once

#include "kdep/types.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace kdep {

// splitmix64; used to derive independent RNG sub-streams from one root seed.
inline std::uint64_t substream_seed(std::uint64_t root, std::uint64_t index) {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// d x D matrix of frequencies, columns i.i.d. N(0, sigma^-2 I).
// Regeneration from the same (seed, d, D, sigma) reproduces W bitwise.
struct FrequencyMatrix {
    Matrix W;
    Bandwidth sigma;
    std::uint64_t seed = 0;
};

inline FrequencyMatrix sample_frequencies(Index d, Index D, const Bandwidth& sigma,
                                          std::uint64_t seed) {
    if (d < 1 || D < 1)
        throw std::invalid_argument("sample_frequencies: d and D must be >= 1");
    if (!(sigma.sigma > 0.0))
        throw std::invalid_argument("sample_frequencies: sigma must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / sigma.sigma);
    Matrix W(d, D);
    // column-major fill: column i is the frequency vector w_i
    for (Index j = 0; j < D; ++j)
        for (Index i = 0; i < d; ++i) W(i, j) = normal(rng);
    return FrequencyMatrix{std::move(W), sigma, seed};
}

// Randomized feature map z(x) = [exp(i w_1'x), ..., exp(i w_D'x)] / sqrt(D),
// stored as separate cosine and sine real parts. Each uncentered row has
// unit squared norm across the two parts.
struct FeatureMap {
    Matrix cosPart;   // n x D, cos(XW)/sqrt(D)
    Matrix sinPart;   // n x D, sin(XW)/sqrt(D)
    bool centered = false;
    FrequencyMatrix frequencies;
};

inline FeatureMap feature_map(const DataMatrix& X, const FrequencyMatrix& W) {
    if (X.cols() != W.W.rows())
        throw ShapeMismatch("feature_map: X columns must match frequency rows");
    require_finite(X, "feature_map");
    const double scale = 1.0 / std::sqrt(static_cast<double>(W.W.cols()));
    const Matrix proj = X * W.W;
    FeatureMap Z;
    Z.cosPart = proj.array().cos() * scale;
    Z.sinPart = proj.array().sin() * scale;
    Z.centered = false;
    Z.frequencies = W;
    return Z;
}

// Subtracts the per-column mean from both parts; equivalent to a left
// multiplication by H = I - (1/n)11'.
inline FeatureMap center_features(const FeatureMap& Z) {
    if (Z.centered)
        throw AlreadyCentered("center_features: map is already centered");
    FeatureMap C = Z;
    C.cosPart.rowwise() -= Z.cosPart.colwise().mean();
    C.sinPart.rowwise() -= Z.sinPart.colwise().mean();
    C.centered = true;
    return C;
}

// Re(Z Z^H) = cos cos' + sin sin'; the Bochner estimate of the SE Gram.
inline Matrix approx_gram(const FeatureMap& Z) {
    return Z.cosPart * Z.cosPart.transpose() + Z.sinPart * Z.sinPart.transpose();
}

}  // namespace kdep
