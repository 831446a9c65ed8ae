#include "pih/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pih {

std::string_view to_string(Task task) {
  return task == Task::kPooH ? "PooH" : "PiH";
}

Task task_from_string(std::string_view name) {
  if (name == "PooH" || name == "pooh") return Task::kPooH;
  if (name == "PiH" || name == "pih") return Task::kPiH;
  throw ValidationError("unknown task '" + std::string(name) + "'");
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (angle > -std::numbers::pi && angle <= std::numbers::pi) return angle;
  double wrapped = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (wrapped <= 0.0) wrapped += kTwoPi;
  return wrapped - std::numbers::pi;
}

bool Pose::is_finite() const {
  const auto a = to_array();
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Pose Pose::wrapped() const {
  return {x, y, z, wrap_angle(theta_x), wrap_angle(theta_y), wrap_angle(theta_z)};
}

bool Action::is_finite() const {
  return std::all_of(delta.begin(), delta.end(), [](double v) { return std::isfinite(v); });
}

bool Action::within_bounds(double tolerance) const {
  for (int i = 0; i < kActionDim; ++i) {
    if (std::abs(delta[static_cast<std::size_t>(i)]) > bound(i) + tolerance) return false;
  }
  return true;
}

void Action::validate() const {
  if (!is_finite()) throw ValidationError("action contains a non-finite component");
  if (!within_bounds()) {
    std::ostringstream msg;
    msg << "action outside clip bounds:";
    for (double d : delta) msg << ' ' << d;
    throw ValidationError(msg.str());
  }
}

Action Action::clipped() const {
  Action out;
  for (int i = 0; i < kActionDim; ++i) {
    out[i] = std::clamp((*this)[i], -bound(i), bound(i));
  }
  return out;
}

Action Action::operator-() const {
  Action out;
  for (int i = 0; i < kActionDim; ++i) out[i] = -(*this)[i];
  return out;
}

Action Action::operator+(const Action& other) const {
  Action out;
  for (int i = 0; i < kActionDim; ++i) out[i] = (*this)[i] + other[i];
  return out;
}

Pose operator+(const Pose& pose, const Action& action) {
  return {pose.x + action[0],       pose.y + action[1],       pose.z + action[2],
          pose.theta_x + action[3], pose.theta_y + action[4], pose.theta_z + action[5]};
}

Action difference(const Pose& from, const Pose& to) {
  const auto a = from.to_array();
  const auto b = to.to_array();
  Action out;
  for (int i = 0; i < kActionDim; ++i) {
    out[i] = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
  }
  return out;
}

void Observation::validate(int expected_h, int expected_w) const {
  if (!k.is_finite()) throw ValidationError("observation pose is not finite");
  if (v.height != expected_h || v.width != expected_w) {
    throw ValidationError("observation image is " + std::to_string(v.height) + "x" +
                          std::to_string(v.width) + ", expected " +
                          std::to_string(expected_h) + "x" + std::to_string(expected_w));
  }
  if (v.pixels.size() != static_cast<std::size_t>(v.height * v.width * 3)) {
    throw ValidationError("observation image buffer has the wrong size");
  }
  for (float p : v.pixels) {
    if (!std::isfinite(p) || p < 0.0f || p > 1.0f) {
      throw ValidationError("observation image value outside [0,1]");
    }
  }
  for (double f : c) {
    if (!std::isfinite(f)) throw ValidationError("tactile feature is not finite");
  }
}

int Trajectory::image_height() const {
  return transitions.empty() ? 0 : transitions.front().obs.v.height;
}

int Trajectory::image_width() const {
  return transitions.empty() ? 0 : transitions.front().obs.v.width;
}

void Trajectory::validate(std::optional<std::size_t> max_length) const {
  if (max_length && transitions.size() > *max_length) {
    throw ValidationError("trajectory has " + std::to_string(transitions.size()) +
                          " transitions, cap is " + std::to_string(*max_length));
  }
  const int h = image_height();
  const int w = image_width();
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& tr = transitions[i];
    const std::string where = "transition " + std::to_string(i) + ": ";
    try {
      tr.obs.validate(h, w);
      tr.next_obs.validate(h, w);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
    if (!tr.action.is_finite()) throw ValidationError(where + "action is not finite");
    if (!std::isfinite(tr.reward) || tr.reward > 0.0) {
      throw ValidationError(where + "reward must be finite and <= 0");
    }
    if (tr.done && i + 1 != transitions.size()) {
      throw ValidationError(where + "done flag set before the final transition");
    }
    if (i + 1 < transitions.size() && !(tr.next_obs.k == transitions[i + 1].obs.k)) {
      throw ValidationError(where + "next_obs pose does not match the following obs pose");
    }
  }
}

}  // namespace pih
