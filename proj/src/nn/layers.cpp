#include "pih/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace pih::nn {

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

void require_forward(bool ok, const char* kind) {
  if (!ok) throw std::logic_error(std::string(kind) + ": backward() called without forward()");
}

}  // namespace

void Layer::check_input(const Matrix& x) const {
  if (x.cols() != in_dim()) {
    throw std::invalid_argument(kind() + ": input has " + std::to_string(x.cols()) +
                                " columns, expected " + std::to_string(in_dim()));
  }
}

Dense::Dense(int in, int out, std::mt19937_64& rng, double init_scale) {
  if (in <= 0 || out <= 0) throw std::invalid_argument("dense: dimensions must be positive");
  const double bound = init_scale / std::sqrt(static_cast<double>(in));
  w_ = {"W", uniform_matrix(in, out, bound, rng), Matrix::Zero(in, out)};
  b_ = {"b", uniform_matrix(1, out, bound, rng), Matrix::Zero(1, out)};
}

Matrix Dense::forward(const Matrix& x) {
  check_input(x);
  x_ = x;
  has_input_ = true;
  Matrix y = x * w_.value;
  y.rowwise() += b_.value.row(0);
  return y;
}

Matrix Dense::backward(const Matrix& grad_out) {
  require_forward(has_input_ && grad_out.rows() == x_.rows(), "dense");
  w_.grad.noalias() += x_.transpose() * grad_out;
  b_.grad += grad_out.colwise().sum();
  return grad_out * w_.value.transpose();
}

Conv2d::Conv2d(int height, int width, int in_channels, int out_channels, int kernel, int stride,
               std::mt19937_64& rng)
    : height_(height), width_(width), cin_(in_channels), cout_(out_channels), kernel_(kernel),
      stride_(stride) {
  if (height < kernel || width < kernel || in_channels <= 0 || out_channels <= 0 || kernel <= 0 ||
      stride <= 0) {
    throw std::invalid_argument("conv2d: invalid geometry");
  }
  out_h_ = (height - kernel) / stride + 1;
  out_w_ = (width - kernel) / stride + 1;
  const int fan_in = kernel * kernel * in_channels;
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  w_ = {"W", uniform_matrix(fan_in, out_channels, bound, rng), Matrix::Zero(fan_in, out_channels)};
  b_ = {"b", uniform_matrix(1, out_channels, bound, rng), Matrix::Zero(1, out_channels)};
}

Matrix Conv2d::forward(const Matrix& x) {
  check_input(x);
  batch_ = x.rows();
  const int patch = kernel_ * kernel_ * cin_;
  const Eigen::Index positions = static_cast<Eigen::Index>(out_h_) * out_w_;
  cols_.resize(batch_ * positions, patch);
  for (Eigen::Index n = 0; n < batch_; ++n) {
    const double* img = x.row(n).data();
    for (int oy = 0; oy < out_h_; ++oy) {
      for (int ox = 0; ox < out_w_; ++ox) {
        double* dst = cols_.row(n * positions + oy * out_w_ + ox).data();
        for (int ky = 0; ky < kernel_; ++ky) {
          const double* src = img + ((oy * stride_ + ky) * width_ + ox * stride_) * cin_;
          std::copy(src, src + kernel_ * cin_, dst + ky * kernel_ * cin_);
        }
      }
    }
  }
  Matrix y(batch_, positions * cout_);
  Eigen::Map<Matrix> out(y.data(), batch_ * positions, cout_);
  out.noalias() = cols_ * w_.value;
  out.rowwise() += b_.value.row(0);
  return y;
}

Matrix Conv2d::backward(const Matrix& grad_out) {
  require_forward(batch_ >= 0 && grad_out.rows() == batch_, "conv2d");
  const Eigen::Index positions = static_cast<Eigen::Index>(out_h_) * out_w_;
  Eigen::Map<const Matrix> g(grad_out.data(), batch_ * positions, cout_);
  w_.grad.noalias() += cols_.transpose() * g;
  b_.grad += g.colwise().sum();
  const Matrix dcols = g * w_.value.transpose();
  Matrix dx = Matrix::Zero(batch_, in_dim());
  for (Eigen::Index n = 0; n < batch_; ++n) {
    double* img = dx.row(n).data();
    for (int oy = 0; oy < out_h_; ++oy) {
      for (int ox = 0; ox < out_w_; ++ox) {
        const double* src = dcols.row(n * positions + oy * out_w_ + ox).data();
        for (int ky = 0; ky < kernel_; ++ky) {
          double* dst = img + ((oy * stride_ + ky) * width_ + ox * stride_) * cin_;
          const double* s = src + ky * kernel_ * cin_;
          for (int j = 0; j < kernel_ * cin_; ++j) dst[j] += s[j];
        }
      }
    }
  }
  return dx;
}

Matrix ReLU::forward(const Matrix& x) {
  check_input(x);
  mask_ = (x.array() > 0.0).cast<double>().matrix();
  return x.cwiseProduct(mask_);
}

Matrix ReLU::backward(const Matrix& grad_out) {
  require_forward(mask_.rows() == grad_out.rows() && mask_.cols() == grad_out.cols(), "relu");
  return grad_out.cwiseProduct(mask_);
}

Matrix Tanh::forward(const Matrix& x) {
  check_input(x);
  y_ = x.array().tanh().matrix();
  return y_;
}

Matrix Tanh::backward(const Matrix& grad_out) {
  require_forward(y_.rows() == grad_out.rows() && y_.cols() == grad_out.cols(), "tanh");
  return (grad_out.array() * (1.0 - y_.array().square())).matrix();
}

}  // namespace pih::nn
