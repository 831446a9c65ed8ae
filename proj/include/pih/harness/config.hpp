#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pih/env/peg_hole_env.hpp"
#include "pih/reversal/reversal.hpp"
#include "pih/rl/baselines.hpp"
#include "pih/rl/trainer.hpp"

namespace pih {

enum class Method { kOurs, kDirectRl, kSl, kResidual };

std::string_view to_string(Method m);
Method method_from_string(std::string_view name);

/// Ablations of the full method. Only valid with Method::kOurs.
struct AblationFlags {
  bool no_vision = false;
  bool no_tactile = false;
  bool no_randomization = false;
  bool no_hybrid = false;
  bool no_bc = false;

  bool any() const { return no_vision || no_tactile || no_randomization || no_hybrid || no_bc; }
  bool operator==(const AblationFlags&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ExperimentConfig {
  EnvConfig env;
  ReversalConfig reversal;
  rl::TrainConfig pooh;  // PooH training (hybrid/bc ignored)
  rl::TrainConfig pih;   // PiH training for ours, direct RL and the residual baseline
  rl::SlConfig sl;

  Method method = Method::kOurs;
  AblationFlags ablation;
  std::vector<std::string> objects{"cube", "d_shape"};
  std::vector<std::uint64_t> seeds{0, 25, 50, 75, 100};
  int trials_per_object = 20;
  int force_successes = 10;          // successful trials entering force aggregates
  int expert_per_object = 100;       // reversed demonstrations per object
  int collect_attempts_per_object = 300;
  std::string catalog;               // empty: built-in catalog

  /// Throws ConfigError (line 0) on inconsistent settings.
  void validate() const;
  /// Stable digest of every field, used for resumable runs.
  std::string digest() const;
};

/// Flat `key = value` text, '#' starts a comment. Unknown keys, malformed
/// values and duplicate keys raise ConfigError with the line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
/// Writes every key; parse_config(write_config(c)) == c field for field.
void write_config(std::ostream& out, const ExperimentConfig& cfg);
/// Applies one `key=value` assignment.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

/// Small, fast settings used by the acceptance suite and the tests
/// (16x16 images, short budgets).
ExperimentConfig desk_config();

}  // namespace pih
