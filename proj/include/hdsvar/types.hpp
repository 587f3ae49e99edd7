#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdsvar {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Index = Eigen::Index;

// Malformed input: files, shapes, index sets, option combinations (CLI exit code 3).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergence, indefinite matrices, degenerate denominators
// (CLI exit code 4).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Observed multivariate series; row t is the observation at time t (t increasing).
struct TimeSeriesPanel {
  MatrixXd x;                       // n x p
  std::vector<std::string> names;   // optional column names, empty or size p

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }

  void validate() const {
    if (x.rows() == 0 || x.cols() == 0) throw DataError("panel is empty");
    if (!names.empty() && static_cast<Index>(names.size()) != x.cols())
      throw DataError("panel has " + std::to_string(x.cols()) + " columns but " +
                      std::to_string(names.size()) + " names");
    if (!x.allFinite()) throw DataError("panel contains non-finite values");
  }
};

// Validates a set of shock-bearing variable indices (0-based, strictly increasing).
inline void validate_shock_indices(const std::vector<Index>& shock_idx, Index p) {
  if (shock_idx.empty()) throw DataError("shock index set is empty");
  for (std::size_t i = 0; i < shock_idx.size(); ++i) {
    if (shock_idx[i] < 0 || shock_idx[i] >= p)
      throw DataError("shock index " + std::to_string(shock_idx[i]) + " out of range [0, " +
                      std::to_string(p) + ")");
    if (i > 0 && shock_idx[i] <= shock_idx[i - 1])
      throw DataError("shock indices must be strictly increasing");
  }
}

}  // namespace hdsvar
