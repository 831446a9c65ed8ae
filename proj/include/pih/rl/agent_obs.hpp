#pragma once

#include "pih/core/types.hpp"
#include "pih/env/peg_hole_env.hpp"
#include "pih/rl/environment.hpp"
#include "pih/sensors/pca.hpp"

namespace pih::rl {

/// Which observation modalities reach the networks. Disabled modalities are
/// replaced by zeros; the network shape is unchanged.
struct Modalities {
  bool vision = true;
  bool tactile = true;
  bool operator==(const Modalities&) const = default;
};

/// Maps environment observations to network inputs: k translations relative
/// to `reference` divided by `translation_scale`, angles divided by
/// `angle_scale`, tactile features divided by `tactile_scale`.
struct ObsNormalizer {
  Pose reference;
  double translation_scale = 0.05;
  double angle_scale = 0.2;
  double tactile_scale = 1.0;
  Modalities modalities;
  int image_h = 32;
  int image_w = 32;

  /// Reference at the nominal inserted pose and tactile scale sqrt of the
  /// leading PCA variance.
  static ObsNormalizer for_env(const EnvConfig& cfg, const sensors::PcaModel& pca,
                               Modalities modalities = {});

  static constexpr int kVecDim = kPoseDim + kTactileDim;
  nn::EncoderSpec encoder_spec() const;
  AgentObs operator()(const Observation& obs) const;
};

/// Physical action from a normalised one (component-wise bound scaling).
Action to_action(const std::vector<double>& normalised);
/// Normalised action, clipped to [-1, 1].
std::vector<double> normalise_action(const Action& action);

}  // namespace pih::rl
