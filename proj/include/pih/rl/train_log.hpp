#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace pih::rl {

struct TrainLogRow {
  long step = 0;
  long episode = 0;
  double reward = 0.0;
  double critic1 = 0.0;
  double critic2 = 0.0;
  double actor = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  int success = -1;  // 0/1 on the last step of an episode, -1 elsewhere

  bool operator==(const TrainLogRow&) const = default;
};

/// Per-step training record. CSV columns:
///   step,episode,reward,critic1,critic2,actor,alpha,rho,lambda,success
/// with an empty success field on steps that do not end an episode.
class TrainLog {
 public:
  /// Throws std::invalid_argument on a non-monotone step or a NaN field.
  void add(const TrainLogRow& row);
  const std::vector<TrainLogRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  void write_csv(std::ostream& out) const;
  void save_csv(const std::filesystem::path& path) const;
  static TrainLog read_csv(std::istream& in);

  /// Mean per-step reward over the last `fraction` of rows.
  double final_reward(double fraction = 0.1) const;
  /// Mean per-step reward over the first `fraction` of rows.
  double initial_reward(double fraction = 0.1) const;
  /// Success flags of completed episodes, in order.
  std::vector<bool> episode_successes() const;
  /// Success rate over the last `count` completed episodes.
  double final_success_rate(std::size_t count) const;

  bool operator==(const TrainLog&) const = default;

 private:
  std::vector<TrainLogRow> rows_;
};

}  // namespace pih::rl
