#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pih/nn/tensor.hpp"

namespace pih::nn {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

/// Layer with a cached forward pass. forward() stores what backward() needs;
/// backward() accumulates parameter gradients and returns the input gradient.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string kind() const = 0;
  virtual int in_dim() const = 0;
  virtual int out_dim() const = 0;
  virtual Matrix forward(const Matrix& x) = 0;
  virtual Matrix backward(const Matrix& grad_out) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;

 protected:
  void check_input(const Matrix& x) const;
};

/// y = x W + b.
class Dense : public Layer {
 public:
  Dense(int in, int out, std::mt19937_64& rng, double init_scale = 1.0);

  std::string kind() const override { return "dense"; }
  int in_dim() const override { return static_cast<int>(w_.value.rows()); }
  int out_dim() const override { return static_cast<int>(w_.value.cols()); }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& grad_out) override;
  std::vector<Parameter*> parameters() override { return {&w_, &b_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  Parameter& weight() { return w_; }
  Parameter& bias() { return b_; }

 private:
  Parameter w_;
  Parameter b_;
  Matrix x_;
  bool has_input_ = false;
};

/// 2-D convolution, kernel k, stride s, no padding. Samples are flattened
/// height x width x channels (channels fastest), matching Image pixels.
class Conv2d : public Layer {
 public:
  Conv2d(int height, int width, int in_channels, int out_channels, int kernel, int stride,
         std::mt19937_64& rng);

  std::string kind() const override { return "conv2d"; }
  int in_dim() const override { return height_ * width_ * cin_; }
  int out_dim() const override { return out_h_ * out_w_ * cout_; }
  int out_height() const { return out_h_; }
  int out_width() const { return out_w_; }
  int out_channels() const { return cout_; }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& grad_out) override;
  std::vector<Parameter*> parameters() override { return {&w_, &b_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2d>(*this); }

 private:
  int height_, width_, cin_, cout_, kernel_, stride_, out_h_, out_w_;
  Parameter w_;  // (k*k*cin) x cout
  Parameter b_;  // 1 x cout
  Matrix cols_;  // (batch*out_h*out_w) x (k*k*cin)
  Eigen::Index batch_ = -1;
};

class ReLU : public Layer {
 public:
  explicit ReLU(int dim) : dim_(dim) {}
  std::string kind() const override { return "relu"; }
  int in_dim() const override { return dim_; }
  int out_dim() const override { return dim_; }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& grad_out) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }

 private:
  int dim_;
  Matrix mask_;
};

class Tanh : public Layer {
 public:
  explicit Tanh(int dim) : dim_(dim) {}
  std::string kind() const override { return "tanh"; }
  int in_dim() const override { return dim_; }
  int out_dim() const override { return dim_; }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& grad_out) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Tanh>(*this); }

 private:
  int dim_;
  Matrix y_;
};

}  // namespace pih::nn
