#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace skt {

/// Row-major so that each species row (coefficients or grid samples) is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when inputs do not conform (array shapes, counts, domains).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration or parameter set violates a documented invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace skt
