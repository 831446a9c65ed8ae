#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pih/core/random.hpp"
#include "pih/core/types.hpp"
#include "pih/env/object_catalog.hpp"
#include "pih/env/peg_hole_env.hpp"

namespace pih {

struct ReversalConfig {
  double z_threshold = 0.01;        // d, m
  double offset_range = 0.02;       // |dx|, |dy| of the poke, m
  double randomized_fraction = 0.5; // share of trajectories that get one poke
  int max_retries = 10;             // fresh offsets tried when a poke cannot move
  double rotation_weight = 1.0;     // reward weight used for relabelling
  double divergence_tolerance = 1e-6;

  void validate() const;
};

/// Replayed kinematics of a contact-free step did not reproduce the record.
class ReplayDivergenceError : public std::runtime_error {
 public:
  ReplayDivergenceError(std::size_t record, double error);
  std::size_t record() const { return record_; }

 private:
  std::size_t record_;
};

// Episode convention: a trajectory with seed s was produced by an environment
// reset from RandomStream(s). Reversal re-derives the hole placement and
// colour factors from that seed.

/// Time reversal of a PooH trajectory: record t' goes from k_{t+1} to k_t
/// with action -a_t. Images are kept, tactile features are zeroed, rewards
/// are relabelled against the fully inserted pose (the PooH start). Only the
/// last record is done.
Trajectory reverse_kinematic(const Trajectory& pooh, double rotation_weight = 1.0);

/// Replays every record of `reversed` in `env` (a PiH environment for the
/// same object) and fills images and tactile features from the simulated
/// contacts. Kinematics are kept as recorded. Throws ReplayDivergenceError if
/// a contact-free plain record does not land on its recorded pose.
Trajectory regenerate_tactile(const Trajectory& reversed, PegHoleEnv& env,
                              double divergence_tolerance = 1e-6);

struct ReversalOutcome {
  Trajectory trajectory;
  bool randomized = false;  // a poke pair was inserted
  bool fallback = false;    // randomization was drawn but no poke could move
  int attempts = 0;         // pokes simulated
};

/// Reversal with tactile regeneration and, for a Bernoulli(randomized_fraction)
/// share of trajectories, one lateral poke a' = (dx, dy, -d, 0, 0, 0) and its
/// recovery a'' = -a_t - a' at the first reversed step whose peg tip is within
/// d of the board surface. Draws come from the kRandomization channel.
ReversalOutcome generate_pih_trajectory(const Trajectory& pooh, const ReversalConfig& cfg,
                                        PegHoleEnv& env, RandomStream& stream);

struct ReversalSummary {
  int input = 0;
  int randomized = 0;
  int fallback = 0;

  std::string line() const;
};

/// Batch reversal of a PooH dataset. `env_cfg` is the PiH environment
/// configuration; each trajectory's object is looked up in `catalog`.
std::vector<Trajectory> reverse_dataset(const std::vector<Trajectory>& pooh,
                                        const ReversalConfig& cfg, const EnvConfig& env_cfg,
                                        const ObjectCatalog& catalog, RandomStream& stream,
                                        ReversalSummary* summary = nullptr);

/// Splits b into (x, y) with y = b - x and x + y == b exactly in floating
/// point. x equals `target` rounded to a multiple of ulp(b) whenever that
/// keeps the split exact, which holds for b on a grid no finer than ulp(x),
/// e.g. differences of pose coordinates; otherwise x is the exact split
/// nearest `target` found, and (b, 0) as a last resort.
std::pair<double, double> exact_split(double b, double target);

}  // namespace pih
