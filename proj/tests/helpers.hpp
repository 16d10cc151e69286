#pragma once

#include "kdep/types.hpp"

#include <random>

namespace kdep::test {

inline Matrix random_matrix(Index n, Index d, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    Matrix M(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) M(i, j) = normal(rng);
    return M;
}

inline Matrix random_uniform(Index n, Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Matrix M(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) M(i, j) = uni(rng);
    return M;
}

// explicit H = I - (1/n)11'
inline Matrix centering_matrix(Index n) {
    return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
}

}  // namespace kdep::test
