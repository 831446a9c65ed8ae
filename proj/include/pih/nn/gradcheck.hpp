#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pih/nn/sequential.hpp"

namespace pih::nn {

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::string worst;  // parameter entry with the largest error
  std::size_t checked = 0;
};

/// Compares analytic gradients with central differences
///   n = (L(p + h) - L(p - h)) / 2h,  rel = |a - n| / max(|a|, |n|, 1e-6).
/// `loss` evaluates the scalar loss at the current parameter values;
/// `backward` must leave dL/dp in each parameter's grad (after zeroing).
GradCheckResult gradcheck(const std::vector<NamedParameter>& params,
                          const std::function<double()>& loss,
                          const std::function<void()>& backward, double h = 1e-5);

/// Built-in checks for every layer type, the composite networks and the
/// policy-head losses, each on random inputs drawn from `seed`.
std::vector<GradCheckResult> gradcheck_all(std::uint64_t seed = 0);

}  // namespace pih::nn
