#include "pih/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace pih::nn {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw CheckpointError("checkpoint truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw CheckpointError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_checkpoint(std::ostream& out, const std::vector<NamedParameter>& params) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, p] : params) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(p->value.rows()));
    put_u32(out, static_cast<std::uint32_t>(p->value.cols()));
  }
  for (const auto& np : params) {
    const Matrix& m = np.param->value;
    for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
  }
  if (!out) throw CheckpointError("checkpoint write failed");
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<NamedParameter>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  write_checkpoint(out, params);
}

std::vector<std::pair<std::string, Matrix>> read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw CheckpointError("not a network checkpoint (bad magic)");
  }
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t n = get_u32(in);
  std::vector<std::pair<std::string, Matrix>> entries;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t len = get_u32(in);
    if (len > 4096) throw CheckpointError("checkpoint entry name too long");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw CheckpointError("checkpoint truncated");
    const std::uint32_t rows = get_u32(in);
    const std::uint32_t cols = get_u32(in);
    if (static_cast<std::uint64_t>(rows) * cols > (1ULL << 28)) throw CheckpointError("checkpoint entry too large");
    entries.emplace_back(std::move(name), Matrix(rows, cols));
  }
  for (auto& [name, m] : entries) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get_f64(in);
  }
  return entries;
}

void load_checkpoint(std::istream& in, const std::vector<NamedParameter>& params) {
  auto entries = read_checkpoint(in);
  if (entries.size() != params.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(entries.size()) +
                          " entries, network has " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, m] = entries[i];
    const Matrix& target = params[i].param->value;
    if (name != params[i].name || m.rows() != target.rows() || m.cols() != target.cols()) {
      throw CheckpointError("checkpoint entry '" + name + "' does not match network parameter '" +
                            params[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i].param->value = std::move(entries[i].second);
}

void load_checkpoint(const std::filesystem::path& path, const std::vector<NamedParameter>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  load_checkpoint(in, params);
}

}  // namespace pih::nn
