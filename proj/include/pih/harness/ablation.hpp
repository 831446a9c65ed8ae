#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pih/harness/config.hpp"
#include "pih/harness/evaluate.hpp"
#include "pih/harness/pipeline.hpp"

namespace pih {

/// One column of the comparison: a method, its ablation flags and an
/// optional randomization ratio override.
struct CellSpec {
  std::string name;
  Method method = Method::kOurs;
  AblationFlags flags;
  std::optional<double> randomized_fraction;

  /// Effective configuration on top of `base`. The no-randomization flag is
  /// folded into a zero randomization ratio, so equivalent cells share one
  /// configuration digest and one run.
  ExperimentConfig apply(const ExperimentConfig& base) const;
};

/// ours, direct_rl, sl, residual, no_vision, no_tactile, no_randomization,
/// ratio_0 ... ratio_100 in steps of 25, no_hybrid, no_bc.
const std::vector<CellSpec>& standard_cells();
/// Throws std::invalid_argument for an unknown name.
const CellSpec& find_cell(const std::string& name);

/// Digest of the config lines whose key starts with one of `prefixes`,
/// combined with `seed`. Identifies a pipeline stage's inputs.
std::string stage_digest(const ExperimentConfig& cfg, const std::vector<std::string>& prefixes,
                         std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  std::string run;        // run directory name (configuration digest)
  bool ok = false;
  std::string error;
  bool reused = false;    // loaded from a completed run, no training
  EvalReport report;      // valid when ok
  double initial_reward = 0.0;  // TrainLog windows, 0 when there is no log
  double final_reward = 0.0;
};

struct CellResult {
  std::string name;
  std::vector<SeedResult> seeds;
  std::optional<EvalReport> merged;  // pooled over successful seeds

  int ok_seeds() const;
  /// Mean success rate over successful seeds.
  double mean_rate() const;
  /// Mean over successful seeds with at least one success of the per-seed
  /// mean max contact force of the first successful trials.
  std::optional<double> mean_max_force() const;
  double mean_final_reward() const;
  const SeedResult* seed(std::uint64_t s) const;
};

struct PoohResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  bool reused = false;
  double initial_reward = 0.0;
  double final_reward = 0.0;
  CollectStats collect;
};

struct MatrixConfig {
  ExperimentConfig base;
  std::vector<std::string> cells;  // empty: every standard cell
  std::filesystem::path out;
  std::ostream* progress = nullptr;
};

struct MatrixResult {
  std::vector<PoohResult> pooh;
  std::vector<CellResult> cells;
  int trained_runs = 0;
  int reused_runs = 0;
  int failed_runs = 0;
  int pooh_trained = 0;

  const CellResult& cell(const std::string& name) const;
  const PoohResult* pooh_for(std::uint64_t seed) const;

  /// cell,seed,status,trials,successes,rate,ci_lo,ci_hi,force_trials,mean_max_force,
  /// initial_reward,final_reward,run
  void write_comparison_csv(std::ostream& out) const;
  /// cell,seeds_ok,seeds_failed,mean_rate,pooled_successes,pooled_trials,ci_lo,ci_hi,
  /// mean_max_force,mean_final_reward
  void write_summary_csv(std::ostream& out) const;
  void write_text(std::ostream& out) const;
};

/// Trains and evaluates every requested cell on every seed of `cfg.base`.
/// Per-seed PooH policies, demonstrations and reversed datasets are shared
/// between cells. Every stage writes a digest of its inputs; a rerun reuses
/// completed stages whose digest matches and trains nothing else. A failing
/// cell is recorded and the matrix continues.
MatrixResult run_ablation_matrix(const MatrixConfig& cfg);

}  // namespace pih
