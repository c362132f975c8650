#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace sigsvdd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A fixed-length slice of a multivariate time series.
/// Rows are time steps (length >= 2), columns are channels.
struct Path {
  Matrix values;

  int length() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
};

inline void validate_path(const Path& p) {
  if (p.length() < 2) throw std::invalid_argument("path needs at least 2 time steps");
  if (p.channels() < 1) throw std::invalid_argument("path needs at least 1 channel");
  if (!p.values.allFinite()) throw std::invalid_argument("path entries must be finite");
}

/// Time-major flattening: (t0,c0), (t0,c1), ..., (t1,c0), ...
inline Vector flatten(const Path& p) {
  Vector out(p.values.size());
  Eigen::Index k = 0;
  for (Eigen::Index t = 0; t < p.values.rows(); ++t)
    for (Eigen::Index c = 0; c < p.values.cols(); ++c) out[k++] = p.values(t, c);
  return out;
}

/// Rows of `out` are the flattened windows, in order.
inline Matrix flatten_all(const std::vector<Path>& windows) {
  if (windows.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Eigen::Index>(windows.size()), windows.front().values.size());
  for (std::size_t i = 0; i < windows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = flatten(windows[i]).transpose();
  return out;
}

}  // namespace sigsvdd
