#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pih/harness/wilson.hpp"
#include "pih/rl/environment.hpp"
#include "pih/rl/peg_hole_adapter.hpp"

namespace pih {

struct EvalConfig {
  int trials_per_object = 20;
  int force_successes = 10;  // successful trials entering the force aggregates
  std::uint64_t seed = 0;
};

/// Seed of evaluation trial `trial` on object `object`. Disjoint from the
/// training episode seeds of the same run seed.
std::uint64_t eval_seed(std::uint64_t seed, std::size_t object, std::size_t trial);

struct TrialRecord {
  std::string object;
  int trial = 0;
  std::uint64_t episode_seed = 0;
  bool success = false;
  int steps = 0;
  double final_depth = 0.0;
  std::vector<double> force;  // contact force after every step, N

  double max_force() const;
  double mean_force() const;
};

/// Force statistics over the first `wanted` successful trials in trial order.
struct ForceAggregate {
  int used = 0;
  int wanted = 0;
  double mean_force = 0.0;      // mean over trials of the per-trial mean force
  double mean_max_force = 0.0;  // mean over trials of the per-trial max force
  bool flagged() const { return used < wanted; }
};

ForceAggregate aggregate_forces(const std::vector<const TrialRecord*>& trials, int wanted);

struct ObjectReport {
  std::string object;
  int trials = 0;
  int successes = 0;
  Interval ci;
  ForceAggregate force;

  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct EvalReport {
  std::vector<ObjectReport> objects;
  std::vector<TrialRecord> trials;  // object-major, trial order
  int trials_total = 0;
  int successes_total = 0;
  Interval ci;
  ForceAggregate force;  // first successful trials across all objects in trial order

  double rate() const {
    return trials_total ? static_cast<double>(successes_total) / trials_total : 0.0;
  }

  /// object,trials,successes,rate,ci_lo,ci_hi,force_trials,mean_force,mean_max_force,flagged
  void write_summary_csv(std::ostream& out) const;
  /// object,trial,seed,success,steps,final_depth,max_force,mean_force,forces
  /// (forces is a ';'-separated series)
  void write_trials_csv(std::ostream& out) const;
  /// Human-readable summary.
  void write_text(std::ostream& out) const;
  /// Writes summary.csv, trials.csv and summary.txt into `dir`.
  void save(const std::filesystem::path& dir) const;

  bool operator==(const EvalReport&) const;

  /// Per-object and overall aggregates of `trials` (object-major order).
  static EvalReport from_trials(std::vector<TrialRecord> trials, int force_successes);
  /// Rebuilds a saved report from its trials.csv.
  static EvalReport load(const std::filesystem::path& dir, int force_successes);
  static std::vector<TrialRecord> read_trials_csv(std::istream& in);
};

/// Pools the trials of several reports (e.g. one per seed) into one.
EvalReport merge_reports(const std::vector<const EvalReport*>& reports, int force_successes);

/// Runs `cfg.trials_per_object` seeded episodes on every object of `env`
/// with the deterministic `policy`. Throws std::invalid_argument if
/// `policy_spec` does not match the environment's observation shape.
EvalReport evaluate(rl::Policy& policy, const nn::EncoderSpec& policy_spec, rl::PegHoleAdapter& env,
                    const EvalConfig& cfg);

/// Oracle controller reading the true hole pose: aligns the peg above the
/// hole opening, then descends straight to the inserted depth.
class ScriptedInsertionPolicy : public rl::Policy {
 public:
  explicit ScriptedInsertionPolicy(rl::PegHoleAdapter& env) : env_(env) {}
  std::vector<double> act(const rl::AgentObs& obs) override;

 private:
  rl::PegHoleAdapter& env_;
};

/// Always outputs zeros.
class NullPolicy : public rl::Policy {
 public:
  explicit NullPolicy(int action_dim) : dim_(action_dim) {}
  std::vector<double> act(const rl::AgentObs&) override { return std::vector<double>(static_cast<std::size_t>(dim_), 0.0); }

 private:
  int dim_;
};

}  // namespace pih
