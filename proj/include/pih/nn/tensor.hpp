#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace pih::nn {

/// Batch matrix: one sample per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Shaped, row-major block of scalars; the exchange format for parameters.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor from_matrix(const Matrix& m);
  /// Rank-2 view as a matrix; rank-1 tensors become a single row.
  Matrix to_matrix() const;

  std::size_t size() const { return values.size(); }
  bool all_finite() const;
  bool operator==(const Tensor&) const = default;
};

bool all_finite(const Matrix& m);

}  // namespace pih::nn
