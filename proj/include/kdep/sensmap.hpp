#pragma once

#include "kdep/hsic.hpp"
#include "kdep/kernel.hpp"
#include "kdep/rff.hpp"
#include "kdep/types.hpp"

#include <cmath>
#include <functional>

namespace kdep {

// Gradient field of the dependence statistic with respect to every input
// entry. The total map is the concatenation [Sx, Sy], n x (dx + dy).
struct SensitivityMap {
    Matrix Sx;   // n x dx, d statistic / d X_ij
    Matrix Sy;   // n x dy, d statistic / d Y_ij
    Method method = Method::HSIC;
};

struct SensitivityAggregate {
    Vector perSample;    // s_i = (1/d) sum_j S_ij^2 over the concatenated row
    Vector perFeature;   // s_j = (1/n) sum_i S_ij^2
    Vector sampleNorms;  // ||S_i|| of the concatenated row
};

// Row-resolved gradient of (1/n^2) Tr(K_x H K_y H):
//   Sx_ij = -(2/(sigma_x^2 n^2)) sum_k (HK_yH)_ik (K_x)_ik (X_ij - X_kj)
// and symmetrically for Y. Evaluated as two matrix products per block.
inline SensitivityMap hsic_sensitivity(const DataMatrix& X, const DataMatrix& Y,
                                       const Bandwidth& sigmaX, const Bandwidth& sigmaY) {
    if (X.rows() != Y.rows())
        throw RowCountMismatch("hsic_sensitivity: X and Y must have the same number of rows");
    const Index n = X.rows();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const Matrix Kx = se_kernel_matrix(X, sigmaX).values;
    const Matrix Ky = se_kernel_matrix(Y, sigmaY).values;

    SensitivityMap S;
    S.method = Method::HSIC;
    {
        const Matrix A = center_gram(Ky).cwiseProduct(Kx);
        const Vector rowSum = A.rowwise().sum();
        const double c = 2.0 / (sigmaX.sigma * sigmaX.sigma * n2);
        S.Sx = c * (A * X - rowSum.asDiagonal() * X);
    }
    {
        const Matrix B = center_gram(Kx).cwiseProduct(Ky);
        const Vector rowSum = B.rowwise().sum();
        const double c = 2.0 / (sigmaY.sigma * sigmaY.sigma * n2);
        S.Sy = c * (B * Y - rowSum.asDiagonal() * Y);
    }
    return S;
}

// Gradient of RHSIC at fixed frequencies, in real cos/sin arithmetic.
// Per sample the cost is O(Dx Dy) reusing the cached cross-covariance;
// no n x n matrix is formed.
inline SensitivityMap rhsic_sensitivity(const DataMatrix& X, const DataMatrix& Y,
                                        const FeatureMap& Zx, const FeatureMap& Zy) {
    if (!Zx.centered || !Zy.centered)
        throw NotCentered("rhsic_sensitivity: feature maps must be centered");
    if (X.rows() != Zx.cosPart.rows() || Y.rows() != Zy.cosPart.rows())
        throw ShapeMismatch("rhsic_sensitivity: data and feature maps disagree on n");
    if (X.cols() != Zx.frequencies.W.rows() || Y.cols() != Zy.frequencies.W.rows())
        throw ShapeMismatch("rhsic_sensitivity: data and frequencies disagree on d");

    const Index n = X.rows();
    const double scale = 2.0 / (static_cast<double>(n) * static_cast<double>(n));
    const CrossCovariance C = rhsic_cross_covariance(Zx, Zy);
    const Matrix& Wx = Zx.frequencies.W;
    const Matrix& Wy = Zy.frequencies.W;

    // uncentered maps re-derived from the data; the derivative of row i of
    // the complex map is that same (uncentered) row weighted by i*w
    const FeatureMap Ux = feature_map(X, Zx.frequencies);
    const FeatureMap Uy = feature_map(Y, Zy.frequencies);

    SensitivityMap S;
    S.method = Method::RHSIC;
    S.Sx.resize(n, X.cols());
    S.Sy.resize(n, Y.cols());
    for (Index i = 0; i < n; ++i) {
        // g = conj(C) zy~_i
        const Vector cy = Zy.cosPart.row(i);
        const Vector sy = Zy.sinPart.row(i);
        const Vector gRe = C.re * cy + C.im * sy;
        const Vector gIm = C.re * sy - C.im * cy;
        const Vector tx = Ux.cosPart.row(i).transpose().cwiseProduct(gIm) -
                          Ux.sinPart.row(i).transpose().cwiseProduct(gRe);
        S.Sx.row(i) = scale * (Wx * tx).transpose();

        // m = C^T zx~_i
        const Vector cx = Zx.cosPart.row(i);
        const Vector sx = Zx.sinPart.row(i);
        const Vector mRe = C.re.transpose() * cx - C.im.transpose() * sx;
        const Vector mIm = C.re.transpose() * sx + C.im.transpose() * cx;
        const Vector ty = Uy.cosPart.row(i).transpose().cwiseProduct(mIm) -
                          Uy.sinPart.row(i).transpose().cwiseProduct(mRe);
        S.Sy.row(i) = scale * (Wy * ty).transpose();
    }
    return S;
}

inline SensitivityAggregate aggregate(const SensitivityMap& S) {
    const Index n = S.Sx.rows();
    const Index dx = S.Sx.cols();
    const Index dy = S.Sy.cols();
    SensitivityAggregate agg;
    agg.perSample =
        (S.Sx.array().square().rowwise().sum() + S.Sy.array().square().rowwise().sum()) /
        static_cast<double>(dx + dy);
    agg.perFeature.resize(dx + dy);
    agg.perFeature.head(dx) = S.Sx.array().square().colwise().mean();
    agg.perFeature.tail(dy) = S.Sy.array().square().colwise().mean();
    agg.sampleNorms = (agg.perSample * static_cast<double>(dx + dy)).cwiseSqrt();
    return agg;
}

using StatisticFn = std::function<double(const DataMatrix&, const DataMatrix&)>;

namespace detail {

// per-column std deviation, 1.0 for constant columns
inline Vector column_scales(const DataMatrix& M) {
    Vector scales(M.cols());
    for (Index j = 0; j < M.cols(); ++j) {
        const double mean = M.col(j).mean();
        const double var = (M.col(j).array() - mean).square().sum() /
                           std::max<double>(1.0, static_cast<double>(M.rows() - 1));
        const double sd = std::sqrt(var);
        scales(j) = sd > 0.0 ? sd : 1.0;
    }
    return scales;
}

}  // namespace detail

// Central-difference gradient oracle: (f(e+h) - f(e-h)) / (2h) per entry,
// with per-feature steps h * std(column). For RHSIC statFn must hold the
// frequency matrices fixed across evaluations.
inline SensitivityMap finite_difference_map(const StatisticFn& statFn, const DataMatrix& X,
                                            const DataMatrix& Y, double h = 1e-5) {
    if (!(h > 0.0))
        throw std::invalid_argument("finite_difference_map: h must be positive");
    const Vector scaleX = detail::column_scales(X);
    const Vector scaleY = detail::column_scales(Y);
    SensitivityMap S;
    S.Sx.resize(X.rows(), X.cols());
    S.Sy.resize(Y.rows(), Y.cols());
    DataMatrix Xp = X;
    for (Index j = 0; j < X.cols(); ++j) {
        const double step = h * scaleX(j);
        for (Index i = 0; i < X.rows(); ++i) {
            const double orig = Xp(i, j);
            Xp(i, j) = orig + step;
            const double fp = statFn(Xp, Y);
            Xp(i, j) = orig - step;
            const double fm = statFn(Xp, Y);
            Xp(i, j) = orig;
            S.Sx(i, j) = (fp - fm) / (2.0 * step);
        }
    }
    DataMatrix Yp = Y;
    for (Index j = 0; j < Y.cols(); ++j) {
        const double step = h * scaleY(j);
        for (Index i = 0; i < Y.rows(); ++i) {
            const double orig = Yp(i, j);
            Yp(i, j) = orig + step;
            const double fp = statFn(X, Yp);
            Yp(i, j) = orig - step;
            const double fm = statFn(X, Yp);
            Yp(i, j) = orig;
            S.Sy(i, j) = (fp - fm) / (2.0 * step);
        }
    }
    return S;
}

}  // namespace kdep
