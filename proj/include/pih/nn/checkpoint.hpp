#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "pih/nn/sequential.hpp"

namespace pih::nn {

inline constexpr char kCheckpointMagic[8] = {'P', 'I', 'H', 'N', 'N', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary layout, little-endian:
//   magic[8] | u32 version | u32 entry count
//   per entry: u32 name length | name bytes | u32 rows | u32 cols
//   then every entry's values as f64 in manifest order (row-major).
void write_checkpoint(std::ostream& out, const std::vector<NamedParameter>& params);
void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedParameter>& params);

/// Entries of a checkpoint file, without binding them to a network.
std::vector<std::pair<std::string, Matrix>> read_checkpoint(std::istream& in);

/// Loads values into `params`; the manifest must match names and shapes exactly.
void load_checkpoint(std::istream& in, const std::vector<NamedParameter>& params);
void load_checkpoint(const std::filesystem::path& path, const std::vector<NamedParameter>& params);

}  // namespace pih::nn
