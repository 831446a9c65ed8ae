#include "pih/rl/replay.hpp"

#include <cmath>

namespace pih::rl {

ReplayStore::ReplayStore(Provenance provenance, std::size_t capacity)
    : provenance_(provenance), capacity_(capacity) {}

void ReplayStore::add(ReplayItem item) {
  if (item.source != provenance_) throw std::invalid_argument("replay item provenance does not match store");
  if (capacity_ == 0 || items_.size() < capacity_) {
    items_.push_back(std::move(item));
    return;
  }
  items_[next_] = std::move(item);
  next_ = (next_ + 1) % capacity_;
}

const ReplayItem& ReplayStore::sample(RandomStream& stream) const {
  if (items_.empty()) throw std::logic_error("sampling from an empty replay store");
  const ReplayItem& item = items_[stream.index(RandomStream::Channel::kReplay, items_.size())];
  if (item.source != provenance_) throw std::logic_error("replay provenance corrupted");
  return item;
}

HybridReplayBuffer::HybridReplayBuffer(std::size_t capacity, std::vector<ReplayItem> expert)
    : standard_(Provenance::kStandard, capacity), expert_(Provenance::kExpert, 0) {
  for (auto& e : expert) expert_.add(std::move(e));
}

void HybridReplayBuffer::add(ReplayItem item) { standard_.add(std::move(item)); }

std::size_t HybridReplayBuffer::expert_share(std::size_t batch, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in [0, 1]");
  return static_cast<std::size_t>(std::floor(rho * static_cast<double>(batch)));
}

Minibatch HybridReplayBuffer::sample(std::size_t batch, double rho, RandomStream& stream) const {
  Minibatch mb;
  mb.expert_count = expert_share(batch, rho);
  if (mb.expert_count > 0 && expert_.empty()) throw std::logic_error("expert share requested without expert data");
  mb.items.reserve(batch);
  for (std::size_t i = 0; i < mb.expert_count; ++i) mb.items.push_back(&expert_.sample(stream));
  for (std::size_t i = mb.expert_count; i < batch; ++i) mb.items.push_back(&standard_.sample(stream));
  return mb;
}

Minibatch HybridReplayBuffer::sample_expert(std::size_t batch, RandomStream& stream) const {
  Minibatch mb;
  mb.expert_count = batch;
  for (std::size_t i = 0; i < batch; ++i) mb.items.push_back(&expert_.sample(stream));
  return mb;
}

}  // namespace pih::rl
