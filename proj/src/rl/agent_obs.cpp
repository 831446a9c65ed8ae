#include "pih/rl/agent_obs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pih::rl {

nn::ObsBatch make_batch(const std::vector<const AgentObs*>& obs, const nn::EncoderSpec& spec) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  nn::ObsBatch b{nn::Matrix(n, spec.image_dim()), nn::Matrix(n, spec.vec_dim)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const AgentObs& o = *obs[static_cast<std::size_t>(i)];
    if (static_cast<int>(o.vec.size()) != spec.vec_dim ||
        static_cast<int>(o.image.size()) != spec.image_dim()) {
      throw std::invalid_argument("observation shape does not match the network");
    }
    for (int j = 0; j < spec.vec_dim; ++j) b.vec(i, j) = o.vec[static_cast<std::size_t>(j)];
    for (int j = 0; j < spec.image_dim(); ++j) b.image(i, j) = o.image[static_cast<std::size_t>(j)];
  }
  return b;
}

nn::ObsBatch make_batch(const AgentObs& obs, const nn::EncoderSpec& spec) {
  return make_batch(std::vector<const AgentObs*>{&obs}, spec);
}

ObsNormalizer ObsNormalizer::for_env(const EnvConfig& cfg, const sensors::PcaModel& pca,
                                     Modalities modalities) {
  ObsNormalizer n;
  n.reference.x = cfg.hole_nominal[0];
  n.reference.y = cfg.hole_nominal[1];
  n.reference.z = cfg.hole_nominal[2] - cfg.insert_depth;
  n.tactile_scale = pca.explained_variance.size() > 0 && pca.explained_variance[0] > 0.0
                        ? std::sqrt(pca.explained_variance[0])
                        : 1.0;
  n.modalities = modalities;
  n.image_h = cfg.render.height;
  n.image_w = cfg.render.width;
  return n;
}

nn::EncoderSpec ObsNormalizer::encoder_spec() const {
  nn::EncoderSpec s;
  s.image_h = image_h;
  s.image_w = image_w;
  s.vec_dim = kVecDim;
  return s;
}

AgentObs ObsNormalizer::operator()(const Observation& obs) const {
  AgentObs out;
  const auto k = obs.k.to_array();
  const auto r = reference.to_array();
  out.vec.resize(kVecDim);
  for (int i = 0; i < kPoseDim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out.vec[u] = (k[u] - r[u]) / (i < 3 ? translation_scale : angle_scale);
  }
  for (int i = 0; i < kTactileDim; ++i) {
    out.vec[static_cast<std::size_t>(kPoseDim + i)] =
        modalities.tactile ? obs.c[static_cast<std::size_t>(i)] / tactile_scale : 0.0;
  }
  if (obs.v.height != image_h || obs.v.width != image_w) {
    throw std::invalid_argument("image is " + std::to_string(obs.v.height) + "x" +
                                std::to_string(obs.v.width) + ", expected " +
                                std::to_string(image_h) + "x" + std::to_string(image_w));
  }
  if (modalities.vision) {
    out.image = obs.v.pixels;
  } else {
    out.image.assign(obs.v.pixels.size(), 0.0f);
  }
  return out;
}

Action to_action(const std::vector<double>& normalised) {
  if (normalised.size() != static_cast<std::size_t>(kActionDim)) {
    throw std::invalid_argument("expected a 6-D action");
  }
  Action a;
  for (int i = 0; i < kActionDim; ++i) {
    a[i] = std::clamp(normalised[static_cast<std::size_t>(i)], -1.0, 1.0) * Action::bound(i);
  }
  return a;
}

std::vector<double> normalise_action(const Action& action) {
  std::vector<double> out(kActionDim);
  for (int i = 0; i < kActionDim; ++i) {
    out[static_cast<std::size_t>(i)] = std::clamp(action[i] / Action::bound(i), -1.0, 1.0);
  }
  return out;
}

}  // namespace pih::rl
