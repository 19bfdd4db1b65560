#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace conlearn {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

using VecRef = Eigen::Ref<const Vector>;
using MutVecRef = Eigen::Ref<Vector>;

/// Sign with the fixed convention sgn(0) = -1, so indicator metrics are total.
inline int sgn(Scalar v) { return v > 0.0 ? 1 : -1; }

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace conlearn
