#include "pih/harness/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "pih/core/base64.hpp"
#include "pih/rl/agent_obs.hpp"

namespace pih {

std::uint64_t eval_seed(std::uint64_t seed, std::size_t object, std::size_t trial) {
  constexpr std::uint64_t kEvalSalt = 0xe7a15eedULL;
  return mix_seed(mix_seed(seed ^ kEvalSalt) ^ mix_seed((static_cast<std::uint64_t>(object) << 32) | trial));
}

double TrialRecord::max_force() const {
  double m = 0.0;
  for (double f : force) m = std::max(m, f);
  return m;
}

double TrialRecord::mean_force() const {
  if (force.empty()) return 0.0;
  double s = 0.0;
  for (double f : force) s += f;
  return s / static_cast<double>(force.size());
}

ForceAggregate aggregate_forces(const std::vector<const TrialRecord*>& trials, int wanted) {
  ForceAggregate a;
  a.wanted = wanted;
  for (const TrialRecord* t : trials) {
    if (a.used >= wanted) break;
    if (!t->success) continue;
    a.mean_force += t->mean_force();
    a.mean_max_force += t->max_force();
    ++a.used;
  }
  if (a.used > 0) {
    a.mean_force /= a.used;
    a.mean_max_force /= a.used;
  }
  return a;
}

namespace {

void summary_row(std::ostream& out, const std::string& name, int n, int s, const Interval& ci,
                 const ForceAggregate& f) {
  out << name << ',' << n << ',' << s << ',' << format_double(n ? static_cast<double>(s) / n : 0.0) << ','
      << format_double(ci.lo) << ',' << format_double(ci.hi) << ',' << f.used << ','
      << format_double(f.mean_force) << ',' << format_double(f.mean_max_force) << ','
      << (f.flagged() ? 1 : 0) << '\n';
}

bool same_force(const ForceAggregate& a, const ForceAggregate& b) {
  return a.used == b.used && a.wanted == b.wanted && a.mean_force == b.mean_force &&
         a.mean_max_force == b.mean_max_force;
}

}  // namespace

void EvalReport::write_summary_csv(std::ostream& out) const {
  out << "object,trials,successes,rate,ci_lo,ci_hi,force_trials,mean_force,mean_max_force,flagged\n";
  for (const auto& o : objects) summary_row(out, o.object, o.trials, o.successes, o.ci, o.force);
  summary_row(out, "all", trials_total, successes_total, ci, force);
}

void EvalReport::write_trials_csv(std::ostream& out) const {
  out << "object,trial,seed,success,steps,final_depth,max_force,mean_force,forces\n";
  for (const auto& t : trials) {
    out << t.object << ',' << t.trial << ',' << t.episode_seed << ',' << (t.success ? 1 : 0) << ','
        << t.steps << ',' << format_double(t.final_depth) << ',' << format_double(t.max_force()) << ','
        << format_double(t.mean_force()) << ',';
    for (std::size_t i = 0; i < t.force.size(); ++i) out << (i ? ";" : "") << format_double(t.force[i]);
    out << '\n';
  }
}

void EvalReport::write_text(std::ostream& out) const {
  auto line = [&out](const std::string& name, int n, int s, const Interval& ci, const ForceAggregate& f) {
    out << name << ": " << s << '/' << n << " success (" << format_double(n ? 100.0 * s / n : 0.0)
        << "%), 95% CI [" << format_double(ci.lo) << ", " << format_double(ci.hi) << "], force over "
        << f.used << " successful trials: mean " << format_double(f.mean_force) << " N, mean max "
        << format_double(f.mean_max_force) << " N";
    if (f.flagged()) out << " (fewer than " << f.wanted << " successes)";
    out << '\n';
  };
  for (const auto& o : objects) line(o.object, o.trials, o.successes, o.ci, o.force);
  line("all", trials_total, successes_total, ci, force);
}

void EvalReport::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  auto s = open("summary.csv");
  write_summary_csv(s);
  auto t = open("trials.csv");
  write_trials_csv(t);
  auto x = open("summary.txt");
  write_text(x);
}

bool EvalReport::operator==(const EvalReport& o) const {
  if (objects.size() != o.objects.size() || trials.size() != o.trials.size()) return false;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& a = objects[i];
    const auto& b = o.objects[i];
    if (a.object != b.object || a.trials != b.trials || a.successes != b.successes || a.ci.lo != b.ci.lo ||
        a.ci.hi != b.ci.hi || !same_force(a.force, b.force)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& a = trials[i];
    const auto& b = o.trials[i];
    if (a.object != b.object || a.trial != b.trial || a.episode_seed != b.episode_seed ||
        a.success != b.success || a.steps != b.steps || a.final_depth != b.final_depth || a.force != b.force) {
      return false;
    }
  }
  return trials_total == o.trials_total && successes_total == o.successes_total && ci.lo == o.ci.lo &&
         ci.hi == o.ci.hi && same_force(force, o.force);
}

EvalReport evaluate(rl::Policy& policy, const nn::EncoderSpec& policy_spec, rl::PegHoleAdapter& env,
                    const EvalConfig& cfg) {
  if (cfg.trials_per_object < 1) throw std::invalid_argument("trials_per_object must be >= 1");
  if (cfg.force_successes < 1) throw std::invalid_argument("force_successes must be >= 1");
  const nn::EncoderSpec env_spec = env.encoder_spec();
  if (policy_spec.image_h != env_spec.image_h || policy_spec.image_w != env_spec.image_w ||
      policy_spec.vec_dim != env_spec.vec_dim) {
    throw std::invalid_argument("policy observation shape " + std::to_string(policy_spec.image_h) + "x" +
                                std::to_string(policy_spec.image_w) + "+" + std::to_string(policy_spec.vec_dim) +
                                " does not match environment " + std::to_string(env_spec.image_h) + "x" +
                                std::to_string(env_spec.image_w) + "+" + std::to_string(env_spec.vec_dim));
  }

  std::vector<TrialRecord> trials;
  for (std::size_t o = 0; o < env.object_count(); ++o) {
    env.pin_object(o);
    for (int t = 0; t < cfg.trials_per_object; ++t) {
      TrialRecord rec;
      rec.trial = t;
      rec.episode_seed = eval_seed(cfg.seed, o, static_cast<std::size_t>(t));
      rl::AgentObsPtr obs = env.reset(rec.episode_seed);
      rec.object = env.env().pair().name;
      bool done = false;
      while (!done) {
        const auto step = env.step(policy.act(*obs));
        rec.force.push_back(step.contact_force);
        ++rec.steps;
        done = step.done;
        rec.success = step.success;
        obs = step.obs;
      }
      rec.final_depth = env.env().state().insertion_depth;
      trials.push_back(std::move(rec));
    }
  }
  env.pin_object(std::nullopt);
  return EvalReport::from_trials(std::move(trials), cfg.force_successes);
}

EvalReport EvalReport::from_trials(std::vector<TrialRecord> trials, int force_successes) {
  EvalReport report;
  report.trials = std::move(trials);
  std::vector<const TrialRecord*> all;
  for (std::size_t i = 0; i < report.trials.size();) {
    const std::string& name = report.trials[i].object;
    std::vector<const TrialRecord*> mine;
    ObjectReport obj;
    obj.object = name;
    for (; i < report.trials.size() && report.trials[i].object == name; ++i) {
      const TrialRecord& t = report.trials[i];
      mine.push_back(&t);
      all.push_back(&t);
      ++obj.trials;
      if (t.success) ++obj.successes;
    }
    obj.ci = wilson_ci(obj.successes, obj.trials);
    obj.force = aggregate_forces(mine, force_successes);
    report.trials_total += obj.trials;
    report.successes_total += obj.successes;
    report.objects.push_back(std::move(obj));
  }
  if (report.trials_total == 0) throw std::invalid_argument("report without trials");
  report.ci = wilson_ci(report.successes_total, report.trials_total);
  report.force = aggregate_forces(all, force_successes);
  return report;
}

std::vector<TrialRecord> EvalReport::read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("object,trial,", 0) != 0) {
    throw std::runtime_error("trials.csv: missing header");
  }
  std::vector<TrialRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    auto bad = [line_no](const std::string& what) {
      return std::runtime_error("trials.csv line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 9) throw bad("expected 9 fields");
    TrialRecord t;
    t.object = f[0];
    const auto trial = parse_int(f[1]);
    std::uint64_t seed_value = 0;
    const auto [end, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), seed_value);
    const bool seed = ec == std::errc() && end == f[2].data() + f[2].size() && !f[2].empty();
    const auto steps = parse_int(f[4]);
    const auto depth = parse_double(f[5]);
    if (!trial || !seed || !steps || !depth || (f[3] != "0" && f[3] != "1")) throw bad("malformed field");
    t.trial = static_cast<int>(*trial);
    t.episode_seed = seed_value;
    t.success = f[3] == "1";
    t.steps = static_cast<int>(*steps);
    t.final_depth = *depth;
    std::size_t p = 0;
    const std::string& series = f[8];
    while (p < series.size()) {
      const auto semi = series.find(';', p);
      const auto v = parse_double(series.substr(p, semi == std::string::npos ? std::string::npos : semi - p));
      if (!v) throw bad("malformed force value");
      t.force.push_back(*v);
      if (semi == std::string::npos) break;
      p = semi + 1;
    }
    out.push_back(std::move(t));
  }
  return out;
}

EvalReport EvalReport::load(const std::filesystem::path& dir, int force_successes) {
  std::ifstream in(dir / "trials.csv");
  if (!in) throw std::runtime_error("cannot read " + (dir / "trials.csv").string());
  return from_trials(read_trials_csv(in), force_successes);
}

EvalReport merge_reports(const std::vector<const EvalReport*>& reports, int force_successes) {
  // Group by object so the merged report stays object-major.
  std::vector<std::string> order;
  for (const EvalReport* r : reports) {
    for (const auto& o : r->objects) {
      if (std::find(order.begin(), order.end(), o.object) == order.end()) order.push_back(o.object);
    }
  }
  std::vector<TrialRecord> trials;
  for (const auto& name : order) {
    for (const EvalReport* r : reports) {
      for (const auto& t : r->trials) {
        if (t.object == name) trials.push_back(t);
      }
    }
  }
  return EvalReport::from_trials(std::move(trials), force_successes);
}

std::vector<double> ScriptedInsertionPolicy::act(const rl::AgentObs&) {
  const PegHoleEnv& e = env_.env();
  const Pose peg = e.state().peg_pose;
  const Pose hole = e.state().hole_pose;
  const Pose target_lat{hole.x, hole.y, peg.z, 0.0, 0.0, hole.theta_z};
  Action a = difference(peg, target_lat);
  double misalignment = 0.0;
  for (int i = 0; i < kActionDim; ++i) misalignment = std::max(misalignment, std::abs(a[i]));
  if (misalignment <= 1e-9) a[2] = e.inserted_pose().z - peg.z;
  return rl::normalise_action(a.clipped());
}

}  // namespace pih
