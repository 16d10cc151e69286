#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace kdep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Rows are samples, columns are features. n >= 2 and all entries finite
// for any dependence computation.
using DataMatrix = Matrix;

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RowCountMismatch : ShapeMismatch {
    using ShapeMismatch::ShapeMismatch;
};

struct NonFiniteInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AllSamplesIdentical : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlreadyCentered : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotCentered : std::logic_error {
    using std::logic_error::logic_error;
};

struct DegenerateNull : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PowerIterationNoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BandwidthHeuristic { MeanDistance, MedianDistance, Fixed };

struct Bandwidth {
    double sigma = 1.0;   // > 0, units of input-space Euclidean distance
    BandwidthHeuristic heuristic = BandwidthHeuristic::Fixed;
};

enum class Method { HSIC, RHSIC };

inline const char* method_name(Method m) {
    return m == Method::HSIC ? "hsic" : "rhsic";
}

struct DependenceStatistic {
    double value = 0.0;            // >= -1e-12 up to round-off
    Method method = Method::HSIC;
    Index n = 0;
    std::optional<Index> D;        // RHSIC only
    double sigmaX = 0.0;
    double sigmaY = 0.0;
};

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite())
        throw NonFiniteInput(std::string(what) + ": matrix has NaN/Inf entries");
}

}  // namespace kdep
