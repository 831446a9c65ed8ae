#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pih/core/types.hpp"

namespace pih {

inline constexpr int kDatasetFormatVersion = 1;

/// Errors raised while reading or writing a trajectory dataset file.
class DatasetError : public std::runtime_error {
 public:
  enum class Kind { kIo, kVersionMismatch, kMalformedRecord, kInvariantViolation };

  DatasetError(Kind kind, std::int64_t location, const std::string& message);

  Kind kind() const { return kind_; }
  /// 1-based line number when reading, byte offset when writing.
  std::int64_t location() const { return location_; }

 private:
  Kind kind_;
  std::int64_t location_;
};

// Line-oriented text format:
//   line 1      JSON header {format_version, task, object_id, seed, image_h,
//               image_w, tactile_dim, n_transitions, env_digest}
//   lines 2..n+1  one transition per line, tab-separated:
//               k[6], v (base64 of little-endian float32, row-major HxWx3),
//               c[15], action[6], reward, done, randomized
//   line n+2    "final", then k[6], v, c[15] of the last next_obs
//               (absent for an empty trajectory)
// Numbers use shortest round-trip decimal text.
void serialize_trajectory(const Trajectory& traj, std::ostream& sink);
Trajectory deserialize_trajectory(std::istream& source);

/// Several trajectories in one file: concatenated single-trajectory blocks.
void write_dataset(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& sink, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> read_dataset(std::istream& source);

}  // namespace pih
