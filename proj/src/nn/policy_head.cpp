#include "pih/nn/policy_head.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pih::nn {

namespace {

constexpr double kActionClip = 1.0 - 1e-6;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Eigen::Index action_dim(const Matrix& head_out) {
  if (head_out.cols() % 2 != 0 || head_out.cols() == 0) {
    throw std::invalid_argument("policy head output must have 2 * action_dim columns");
  }
  return head_out.cols() / 2;
}

Matrix clamped_log_std(const Matrix& head_out) {
  const Eigen::Index a = action_dim(head_out);
  return head_out.rightCols(a).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

// 1 where the log-std is inside the clamp range (gradient passes).
double pass(double raw) { return raw > kLogStdMin && raw < kLogStdMax ? 1.0 : 0.0; }

}  // namespace

double log1m_tanh2(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

PolicySample sample_policy(const Matrix& head_out, const Matrix& eps) {
  const Eigen::Index a = action_dim(head_out);
  if (eps.rows() != head_out.rows() || eps.cols() != a) throw std::invalid_argument("noise shape mismatch");
  PolicySample s;
  s.mean = head_out.leftCols(a);
  s.log_std = clamped_log_std(head_out);
  s.eps = eps;
  s.pre = s.mean + (s.log_std.array().exp() * eps.array()).matrix();
  s.action = s.pre.array().tanh().matrix();
  s.log_prob.resize(head_out.rows(), 1);
  for (Eigen::Index b = 0; b < head_out.rows(); ++b) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      lp += -0.5 * eps(b, j) * eps(b, j) - s.log_std(b, j) - kHalfLog2Pi - log1m_tanh2(s.pre(b, j));
    }
    s.log_prob(b, 0) = lp;
  }
  return s;
}

PolicySample sample_policy(const Matrix& head_out, RandomStream& stream) {
  const Eigen::Index a = action_dim(head_out);
  Matrix eps(head_out.rows(), a);
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    eps.data()[i] = stream.normal(RandomStream::Channel::kPolicy);
  }
  return sample_policy(head_out, eps);
}

Matrix mean_action(const Matrix& head_out) {
  const Eigen::Index a = action_dim(head_out);
  return head_out.leftCols(a).array().tanh().matrix();
}

Matrix sample_backward(const PolicySample& s, const Matrix& grad_action, const Matrix& grad_log_prob) {
  const Eigen::Index a = s.mean.cols();
  const Eigen::Index n = s.mean.rows();
  Matrix g(n, 2 * a);
  for (Eigen::Index b = 0; b < n; ++b) {
    const double gl = grad_log_prob(b, 0);
    for (Eigen::Index j = 0; j < a; ++j) {
      const double t = s.action(b, j);
      // d action / d pre = 1 - t^2; d log_prob / d pre = 2 t (squash term).
      const double d_pre = grad_action(b, j) * (1.0 - t * t) + gl * 2.0 * t;
      const double sigma = std::exp(s.log_std(b, j));
      g(b, j) = d_pre;
      // log_prob depends on log_std explicitly (-1) and through pre (sigma * eps).
      g(b, a + j) = (d_pre * sigma * s.eps(b, j) - gl) * pass(s.log_std(b, j));
    }
  }
  return g;
}

Matrix log_prob(const Matrix& head_out, const Matrix& action) {
  const Eigen::Index a = action_dim(head_out);
  if (action.rows() != head_out.rows() || action.cols() != a) {
    throw std::invalid_argument("action batch shape mismatch");
  }
  const Matrix log_std = clamped_log_std(head_out);
  Matrix out(head_out.rows(), 1);
  for (Eigen::Index b = 0; b < head_out.rows(); ++b) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < a; ++j) {
      const double u = std::atanh(std::clamp(action(b, j), -kActionClip, kActionClip));
      const double z = (u - head_out(b, j)) * std::exp(-log_std(b, j));
      lp += -0.5 * z * z - log_std(b, j) - kHalfLog2Pi - log1m_tanh2(u);
    }
    out(b, 0) = lp;
  }
  return out;
}

Matrix log_prob_backward(const Matrix& head_out, const Matrix& action, const Matrix& grad_log_prob) {
  const Eigen::Index a = action_dim(head_out);
  Matrix g(head_out.rows(), 2 * a);
  for (Eigen::Index b = 0; b < head_out.rows(); ++b) {
    for (Eigen::Index j = 0; j < a; ++j) {
      const double raw = head_out(b, a + j);
      const double ls = std::clamp(raw, kLogStdMin, kLogStdMax);
      const double u = std::atanh(std::clamp(action(b, j), -kActionClip, kActionClip));
      const double z = (u - head_out(b, j)) * std::exp(-ls);
      g(b, j) = grad_log_prob(b, 0) * z * std::exp(-ls);
      g(b, a + j) = grad_log_prob(b, 0) * (z * z - 1.0) * pass(raw);
    }
  }
  return g;
}

}  // namespace pih::nn
