#include "pih/rl/train_log.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pih/core/base64.hpp"

namespace pih::rl {

namespace {
constexpr const char* kHeader = "step,episode,reward,critic1,critic2,actor,alpha,rho,lambda,success";
}

void TrainLog::add(const TrainLogRow& row) {
  if (!rows_.empty() && row.step <= rows_.back().step) throw std::invalid_argument("train log steps must increase");
  for (double v : {row.reward, row.critic1, row.critic2, row.actor, row.alpha, row.rho, row.lambda}) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in train log row " + std::to_string(row.step));
  }
  rows_.push_back(row);
}

void TrainLog::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (const auto& r : rows_) {
    out << r.step << ',' << r.episode;
    for (double v : {r.reward, r.critic1, r.critic2, r.actor, r.alpha, r.rho, r.lambda}) {
      out << ',' << format_double(v);
    }
    out << ',';
    if (r.success >= 0) out << r.success;
    out << '\n';
  }
}

void TrainLog::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out);
}

TrainLog TrainLog::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("train log: bad header");
  TrainLog log;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw std::runtime_error("train log: bad field count on line " + std::to_string(line_no));
    TrainLogRow r;
    const auto step = parse_int(f[0]);
    const auto ep = parse_int(f[1]);
    if (!step || !ep) throw std::runtime_error("train log: bad integer on line " + std::to_string(line_no));
    r.step = static_cast<long>(*step);
    r.episode = static_cast<long>(*ep);
    double* dst[] = {&r.reward, &r.critic1, &r.critic2, &r.actor, &r.alpha, &r.rho, &r.lambda};
    for (int i = 0; i < 7; ++i) {
      const auto v = parse_double(f[static_cast<std::size_t>(2 + i)]);
      if (!v) throw std::runtime_error("train log: bad number on line " + std::to_string(line_no));
      *dst[i] = *v;
    }
    r.success = f[9].empty() ? -1 : (f[9] == "1" ? 1 : 0);
    log.add(r);
  }
  return log;
}

namespace {
double mean_reward(const std::vector<TrainLogRow>& rows, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += rows[i].reward;
  return s / static_cast<double>(end - begin);
}
std::size_t window(std::size_t n, double fraction) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
}
}  // namespace

double TrainLog::final_reward(double fraction) const {
  const std::size_t n = rows_.size();
  return n == 0 ? 0.0 : mean_reward(rows_, n - std::min(n, window(n, fraction)), n);
}

double TrainLog::initial_reward(double fraction) const {
  const std::size_t n = rows_.size();
  return n == 0 ? 0.0 : mean_reward(rows_, 0, std::min(n, window(n, fraction)));
}

std::vector<bool> TrainLog::episode_successes() const {
  std::vector<bool> out;
  for (const auto& r : rows_) {
    if (r.success >= 0) out.push_back(r.success == 1);
  }
  return out;
}

double TrainLog::final_success_rate(std::size_t count) const {
  const auto s = episode_successes();
  if (s.empty() || count == 0) return 0.0;
  const std::size_t k = std::min(count, s.size());
  std::size_t hits = 0;
  for (std::size_t i = s.size() - k; i < s.size(); ++i) hits += s[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

}  // namespace pih::rl
