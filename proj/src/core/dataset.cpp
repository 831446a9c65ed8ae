#include "pih/core/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "pih/core/base64.hpp"

namespace pih {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string kind_prefix(DatasetError::Kind kind) {
  switch (kind) {
    case DatasetError::Kind::kIo: return "I/O failure";
    case DatasetError::Kind::kVersionMismatch: return "version mismatch";
    case DatasetError::Kind::kMalformedRecord: return "malformed record";
    case DatasetError::Kind::kInvariantViolation: return "invariant violation";
  }
  return "dataset error";
}

std::string encode_image(const Image& image) {
  std::vector<std::uint8_t> bytes(image.pixels.size() * 4);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(image.pixels[i]);
    bytes[4 * i + 0] = static_cast<std::uint8_t>(bits & 0xff);
    bytes[4 * i + 1] = static_cast<std::uint8_t>((bits >> 8) & 0xff);
    bytes[4 * i + 2] = static_cast<std::uint8_t>((bits >> 16) & 0xff);
    bytes[4 * i + 3] = static_cast<std::uint8_t>((bits >> 24) & 0xff);
  }
  return base64_encode(bytes);
}

void append_numbers(std::string& line, std::span<const double> values) {
  for (double v : values) {
    line += format_double(v);
    line += '\t';
  }
}

void append_observation(std::string& line, const Observation& obs) {
  const auto k = obs.k.to_array();
  append_numbers(line, k);
  line += encode_image(obs.v);
  line += '\t';
  append_numbers(line, obs.c);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }
  std::int64_t line_no() const { return line_no_; }
  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream& in_;
  std::int64_t line_no_ = 0;
};

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

struct FieldCursor {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  std::int64_t line_no;

  [[noreturn]] void fail(const std::string& what) const {
    throw DatasetError(DatasetError::Kind::kMalformedRecord, line_no,
                       what + " (field " + std::to_string(pos + 1) + ")");
  }

  std::string_view take() {
    if (pos >= fields.size()) fail("record has too few fields");
    return fields[pos++];
  }
  double number() {
    const auto tok = take();
    const auto v = parse_double(tok);
    if (!v) {
      --pos;
      fail("cannot parse number '" + std::string(tok) + "'");
    }
    return *v;
  }
  bool flag() {
    const auto tok = take();
    if (tok == "0") return false;
    if (tok == "1") return true;
    --pos;
    fail("expected 0 or 1");
  }
  Image image(int h, int w) {
    const auto tok = take();
    const auto bytes = base64_decode(tok);
    Image img(h, w);
    if (!bytes || bytes->size() != img.pixels.size() * 4) {
      --pos;
      fail("image payload is not " + std::to_string(h) + "x" + std::to_string(w) + "x3 float32");
    }
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const std::uint32_t bits = std::uint32_t{(*bytes)[4 * i]} |
                                 (std::uint32_t{(*bytes)[4 * i + 1]} << 8) |
                                 (std::uint32_t{(*bytes)[4 * i + 2]} << 16) |
                                 (std::uint32_t{(*bytes)[4 * i + 3]} << 24);
      img.pixels[i] = std::bit_cast<float>(bits);
    }
    return img;
  }
  Observation observation(int h, int w) {
    Observation obs;
    std::array<double, kPoseDim> k;
    for (auto& v : k) v = number();
    obs.k = Pose::from_array(k);
    obs.v = image(h, w);
    for (auto& v : obs.c) v = number();
    return obs;
  }
  void expect_end() {
    // Records end with a tab-free last field; a trailing empty field is tolerated.
    if (pos == fields.size()) return;
    if (pos + 1 == fields.size() && fields[pos].empty()) return;
    fail("record has extra fields");
  }
};

Trajectory read_block(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) {
    throw DatasetError(DatasetError::Kind::kMalformedRecord, reader.line_no() + 1,
                       "missing header line");
  }
  const std::int64_t header_line = reader.line_no();
  ordered_json header;
  try {
    header = ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw DatasetError(DatasetError::Kind::kMalformedRecord, header_line,
                       std::string("header is not valid JSON: ") + e.what());
  }

  Trajectory traj;
  int image_h = 0;
  int image_w = 0;
  std::size_t n_transitions = 0;
  try {
    const int version = header.at("format_version").get<int>();
    if (version != kDatasetFormatVersion) {
      throw DatasetError(DatasetError::Kind::kVersionMismatch, header_line,
                         "format_version " + std::to_string(version) + " is not supported (expected " +
                             std::to_string(kDatasetFormatVersion) + ")");
    }
    traj.task = task_from_string(header.at("task").get<std::string>());
    traj.object_id = header.at("object_id").get<std::string>();
    traj.seed = header.at("seed").get<std::int64_t>();
    image_h = header.at("image_h").get<int>();
    image_w = header.at("image_w").get<int>();
    if (header.at("tactile_dim").get<int>() != kTactileDim) {
      throw DatasetError(DatasetError::Kind::kMalformedRecord, header_line,
                         "tactile_dim must be " + std::to_string(kTactileDim));
    }
    n_transitions = header.at("n_transitions").get<std::size_t>();
    traj.env_digest = header.at("env_digest").get<std::string>();
  } catch (const DatasetError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetError(DatasetError::Kind::kMalformedRecord, header_line,
                       std::string("bad header: ") + e.what());
  }
  if (image_h < 0 || image_w < 0) {
    throw DatasetError(DatasetError::Kind::kMalformedRecord, header_line, "negative image size");
  }

  struct Row {
    Observation obs;
    Action action;
    double reward;
    bool done;
    bool randomized;
  };
  std::vector<Row> rows;
  rows.reserve(n_transitions);
  for (std::size_t i = 0; i < n_transitions; ++i) {
    if (!reader.next(line)) {
      throw DatasetError(DatasetError::Kind::kMalformedRecord, reader.line_no() + 1,
                         "file ends after " + std::to_string(i) + " of " +
                             std::to_string(n_transitions) + " transitions");
    }
    FieldCursor cur{split_tabs(line), 0, reader.line_no()};
    Row row;
    row.obs = cur.observation(image_h, image_w);
    for (int j = 0; j < kActionDim; ++j) row.action[j] = cur.number();
    row.reward = cur.number();
    row.done = cur.flag();
    row.randomized = cur.flag();
    cur.expect_end();
    rows.push_back(std::move(row));
  }

  Observation final_obs;
  if (n_transitions > 0) {
    if (!reader.next(line)) {
      throw DatasetError(DatasetError::Kind::kMalformedRecord, reader.line_no() + 1,
                         "missing final observation line");
    }
    FieldCursor cur{split_tabs(line), 0, reader.line_no()};
    if (cur.take() != "final") {
      cur.pos = 0;
      cur.fail("expected final observation line");
    }
    final_obs = cur.observation(image_h, image_w);
    cur.expect_end();
  }

  traj.transitions.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Transition tr;
    tr.obs = std::move(rows[i].obs);
    tr.action = rows[i].action;
    tr.reward = rows[i].reward;
    tr.done = rows[i].done;
    tr.randomized = rows[i].randomized;
    traj.transitions.push_back(std::move(tr));
  }
  for (std::size_t i = 0; i < traj.transitions.size(); ++i) {
    traj.transitions[i].next_obs =
        i + 1 < traj.transitions.size() ? traj.transitions[i + 1].obs : final_obs;
  }

  try {
    traj.validate();
  } catch (const ValidationError& e) {
    throw DatasetError(DatasetError::Kind::kInvariantViolation, header_line, e.what());
  }
  return traj;
}

}  // namespace

DatasetError::DatasetError(Kind kind, std::int64_t location, const std::string& message)
    : std::runtime_error(kind_prefix(kind) + " at " +
                         (kind == Kind::kIo ? "byte offset " : "line ") + std::to_string(location) +
                         ": " + message),
      kind_(kind),
      location_(location) {}

void serialize_trajectory(const Trajectory& traj, std::ostream& sink) {
  try {
    traj.validate();
  } catch (const ValidationError& e) {
    throw DatasetError(DatasetError::Kind::kInvariantViolation, 0, e.what());
  }
  ordered_json header;
  header["format_version"] = kDatasetFormatVersion;
  header["task"] = std::string(to_string(traj.task));
  header["object_id"] = traj.object_id;
  header["seed"] = traj.seed;
  header["image_h"] = traj.image_height();
  header["image_w"] = traj.image_width();
  header["tactile_dim"] = kTactileDim;
  header["n_transitions"] = traj.transitions.size();
  header["env_digest"] = traj.env_digest;

  auto check = [&sink]() {
    if (!sink) {
      const auto offset = static_cast<std::int64_t>(sink.rdbuf() ? sink.rdbuf()->pubseekoff(
                                                                       0, std::ios::cur, std::ios::out)
                                                                 : std::streampos(-1));
      throw DatasetError(DatasetError::Kind::kIo, offset, "write failed");
    }
  };

  sink << header.dump() << '\n';
  check();
  std::string line;
  for (const Transition& tr : traj.transitions) {
    line.clear();
    append_observation(line, tr.obs);
    append_numbers(line, tr.action.delta);
    line += format_double(tr.reward);
    line += '\t';
    line += tr.done ? '1' : '0';
    line += '\t';
    line += tr.randomized ? '1' : '0';
    line += '\n';
    sink << line;
    check();
  }
  if (!traj.transitions.empty()) {
    line = "final\t";
    append_observation(line, traj.transitions.back().next_obs);
    line.pop_back();  // trailing tab
    line += '\n';
    sink << line;
    check();
  }
}

Trajectory deserialize_trajectory(std::istream& source) {
  LineReader reader(source);
  return read_block(reader);
}

void write_dataset(std::ostream& sink, const std::vector<Trajectory>& trajectories) {
  for (const auto& traj : trajectories) serialize_trajectory(traj, sink);
  sink.flush();
  if (!sink) throw DatasetError(DatasetError::Kind::kIo, -1, "flush failed");
}

std::vector<Trajectory> read_dataset(std::istream& source) {
  LineReader reader(source);
  std::vector<Trajectory> out;
  while (!reader.at_eof()) out.push_back(read_block(reader));
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError(DatasetError::Kind::kIo, 0, "cannot open " + path.string());
  write_dataset(out, trajectories);
}

std::vector<Trajectory> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::kIo, 0, "cannot open " + path.string());
  return read_dataset(in);
}

}  // namespace pih
