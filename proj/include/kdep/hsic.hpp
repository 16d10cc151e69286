#pragma once

#include "kdep/kernel.hpp"
#include "kdep/rff.hpp"
#include "kdep/types.hpp"

namespace kdep {

// Empirical HSIC: (1/n^2) Tr(K_x H K_y H). Centers K_y once and evaluates
// the trace as an elementwise product-sum with K_x (no matrix product).
inline DependenceStatistic hsic(const DataMatrix& X, const DataMatrix& Y,
                                const Bandwidth& sigmaX, const Bandwidth& sigmaY) {
    if (X.rows() != Y.rows())
        throw RowCountMismatch("hsic: X and Y must have the same number of rows");
    if (X.rows() < 2)
        throw ShapeMismatch("hsic: need at least two samples");
    const GramMatrix Kx = se_kernel_matrix(X, sigmaX);
    const GramMatrix Ky = se_kernel_matrix(Y, sigmaY);
    const Matrix Ly = center_gram(Ky.values);
    const double n = static_cast<double>(X.rows());
    DependenceStatistic s;
    s.value = Kx.values.cwiseProduct(Ly).sum() / (n * n);
    s.method = Method::HSIC;
    s.n = X.rows();
    s.sigmaX = sigmaX.sigma;
    s.sigmaY = sigmaY.sigma;
    return s;
}

// Randomized cross-covariance C = Z~x^H Z~y in R^{Dx x Dy} real/imaginary
// blocks, built from the four cos/sin part-products. Computed once and
// reused by rhsic and the RHSIC sensitivity maps.
struct CrossCovariance {
    Matrix re;   // cosX' cosY + sinX' sinY
    Matrix im;   // cosX' sinY - sinX' cosY
};

inline CrossCovariance rhsic_cross_covariance(const FeatureMap& Zx, const FeatureMap& Zy) {
    if (!Zx.centered || !Zy.centered)
        throw NotCentered("rhsic_cross_covariance: both feature maps must be centered");
    if (Zx.cosPart.rows() != Zy.cosPart.rows())
        throw RowCountMismatch("rhsic_cross_covariance: feature maps disagree on n");
    CrossCovariance C;
    C.re = Zx.cosPart.transpose() * Zy.cosPart + Zx.sinPart.transpose() * Zy.sinPart;
    C.im = Zx.cosPart.transpose() * Zy.sinPart - Zx.sinPart.transpose() * Zy.cosPart;
    return C;
}

// RHSIC = (1/n^2) ||C||_F^2, the real part of the Hermitian trace in the
// randomized estimator. O(n Dx Dy); no n x n matrix is ever formed.
inline DependenceStatistic rhsic(const FeatureMap& Zx, const FeatureMap& Zy) {
    const CrossCovariance C = rhsic_cross_covariance(Zx, Zy);
    const double n = static_cast<double>(Zx.cosPart.rows());
    DependenceStatistic s;
    s.value = (C.re.squaredNorm() + C.im.squaredNorm()) / (n * n);
    s.method = Method::RHSIC;
    s.n = Zx.cosPart.rows();
    s.D = Zx.cosPart.cols();
    s.sigmaX = Zx.frequencies.sigma.sigma;
    s.sigmaY = Zy.frequencies.sigma.sigma;
    return s;
}

}  // namespace kdep
