#include "pih/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace pih::nn {

Tensor::Tensor(std::vector<int> s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  if (n != values.size()) {
    throw std::invalid_argument("tensor shape holds " + std::to_string(n) + " values, got " +
                                std::to_string(values.size()));
  }
}

Tensor Tensor::from_matrix(const Matrix& m) {
  return Tensor({static_cast<int>(m.rows()), static_cast<int>(m.cols())},
                std::vector<double>(m.data(), m.data() + m.size()));
}

Matrix Tensor::to_matrix() const {
  Eigen::Index rows = 1;
  Eigen::Index cols = 0;
  if (shape.size() == 1) {
    cols = shape[0];
  } else if (shape.size() == 2) {
    rows = shape[0];
    cols = shape[1];
  } else {
    throw std::invalid_argument("only rank-1 and rank-2 tensors map to matrices");
  }
  return Eigen::Map<const Matrix>(values.data(), rows, cols);
}

bool Tensor::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace pih::nn
