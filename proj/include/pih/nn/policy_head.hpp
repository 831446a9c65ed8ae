#pragma once

#include "pih/core/random.hpp"
#include "pih/nn/tensor.hpp"

namespace pih::nn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Tanh-squashed diagonal Gaussian over actions normalised to [-1, 1].
/// The head input is B x 2A: means, then unclamped log-stds.
/// Log-densities are those of the normalised action.
struct PolicySample {
  Matrix mean;     // B x A
  Matrix log_std;  // B x A, clamped
  Matrix eps;      // B x A standard normal draws
  Matrix pre;      // B x A, mean + std * eps
  Matrix action;   // B x A, tanh(pre)
  Matrix log_prob; // B x 1
};

/// log(1 - tanh(u)^2), stable for large |u|.
double log1m_tanh2(double u);

/// Reparameterised draw using the kPolicy channel.
PolicySample sample_policy(const Matrix& head_out, RandomStream& stream);
/// Draw with caller-provided standard normal noise.
PolicySample sample_policy(const Matrix& head_out, const Matrix& eps);
/// tanh(mean): the deterministic action.
Matrix mean_action(const Matrix& head_out);

/// Gradient w.r.t. the head output of sum_b(g_action . action_b + g_logp_b * log_prob_b),
/// holding eps fixed.
Matrix sample_backward(const PolicySample& s, const Matrix& grad_action, const Matrix& grad_log_prob);

/// Log-density of given normalised actions (clipped to +-(1 - 1e-6)).
Matrix log_prob(const Matrix& head_out, const Matrix& action);
/// Gradient of sum_b(g_b * log_prob_b) w.r.t. the head output.
Matrix log_prob_backward(const Matrix& head_out, const Matrix& action, const Matrix& grad_log_prob);

}  // namespace pih::nn
