#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hiergcn {

// Node-feature matrices are row-major: propagation kernels and scoring walk
// whole rows, so rows must be contiguous.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

using index_t = std::int64_t;

// Malformed or inconsistent input (files, ids, shapes). Maps to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical breakdown (divergence, non-convergence). Maps to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hiergcn
