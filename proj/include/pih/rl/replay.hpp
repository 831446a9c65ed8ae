#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pih/core/random.hpp"
#include "pih/rl/environment.hpp"

namespace pih::rl {

enum class Provenance : std::uint8_t { kStandard, kExpert };

struct ReplayItem {
  AgentObsPtr obs;
  std::vector<double> action;  // normalised
  double reward = 0.0;
  AgentObsPtr next_obs;
  bool terminal = false;
  Provenance source = Provenance::kStandard;
};

/// Uniform-sampling store tagged with one provenance. Capacity 0 means
/// unbounded; otherwise the oldest item is overwritten (FIFO).
class ReplayStore {
 public:
  ReplayStore(Provenance provenance, std::size_t capacity);

  /// Throws std::invalid_argument if the item carries another provenance.
  void add(ReplayItem item);
  const ReplayItem& sample(RandomStream& stream) const;
  const ReplayItem& at(std::size_t i) const { return items_[i]; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  Provenance provenance() const { return provenance_; }

 private:
  Provenance provenance_;
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<ReplayItem> items_;
};

struct Minibatch {
  std::vector<const ReplayItem*> items;
  std::size_t expert_count = 0;  // the first expert_count items are expert samples
};

/// Standard FIFO store plus an immutable expert store. A minibatch of size B
/// draws floor(rho * B) items from the expert store and the rest from the
/// standard store.
class HybridReplayBuffer {
 public:
  explicit HybridReplayBuffer(std::size_t capacity, std::vector<ReplayItem> expert = {});

  void add(ReplayItem item);
  Minibatch sample(std::size_t batch, double rho, RandomStream& stream) const;
  /// Expert-only batch for behaviour cloning.
  Minibatch sample_expert(std::size_t batch, RandomStream& stream) const;

  static std::size_t expert_share(std::size_t batch, double rho);

  const ReplayStore& standard() const { return standard_; }
  const ReplayStore& expert() const { return expert_; }

 private:
  ReplayStore standard_;
  ReplayStore expert_;
};

}  // namespace pih::rl
