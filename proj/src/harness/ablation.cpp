#include "pih/harness/ablation.hpp"

#include <cmath>
#include <map>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pih/core/base64.hpp"
#include "pih/core/dataset.hpp"

namespace pih {

namespace fs = std::filesystem;

ExperimentConfig CellSpec::apply(const ExperimentConfig& base) const {
  ExperimentConfig c = base;
  c.method = method;
  c.ablation = flags;
  if (randomized_fraction) c.reversal.randomized_fraction = *randomized_fraction;
  if (c.ablation.no_randomization) {
    c.reversal.randomized_fraction = 0.0;
    c.ablation.no_randomization = false;
  }
  c.validate();
  return c;
}

const std::vector<CellSpec>& standard_cells() {
  static const std::vector<CellSpec> cells = [] {
    std::vector<CellSpec> v;
    v.push_back({"ours", Method::kOurs, {}, std::nullopt});
    v.push_back({"direct_rl", Method::kDirectRl, {}, std::nullopt});
    v.push_back({"sl", Method::kSl, {}, std::nullopt});
    v.push_back({"residual", Method::kResidual, {}, std::nullopt});
    AblationFlags f;
    f.no_vision = true;
    v.push_back({"no_vision", Method::kOurs, f, std::nullopt});
    f = {};
    f.no_tactile = true;
    v.push_back({"no_tactile", Method::kOurs, f, std::nullopt});
    f = {};
    f.no_randomization = true;
    v.push_back({"no_randomization", Method::kOurs, f, std::nullopt});
    for (int pct : {0, 25, 50, 75, 100}) {
      v.push_back({"ratio_" + std::to_string(pct), Method::kOurs, {}, pct / 100.0});
    }
    f = {};
    f.no_hybrid = true;
    v.push_back({"no_hybrid", Method::kOurs, f, std::nullopt});
    f = {};
    f.no_bc = true;
    v.push_back({"no_bc", Method::kOurs, f, std::nullopt});
    return v;
  }();
  return cells;
}

const CellSpec& find_cell(const std::string& name) {
  for (const auto& c : standard_cells()) {
    if (c.name == name) return c;
  }
  throw std::invalid_argument("unknown ablation cell '" + name + "'");
}

std::string stage_digest(const ExperimentConfig& cfg, const std::vector<std::string>& prefixes,
                         std::uint64_t seed) {
  std::ostringstream all;
  write_config(all, cfg);
  std::istringstream lines(all.str());
  std::string kept = "seed=" + std::to_string(seed) + "\n";
  for (std::string line; std::getline(lines, line);) {
    for (const auto& p : prefixes) {
      if (line.rfind(p, 0) == 0) {
        kept += line + "\n";
        break;
      }
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(kept)));
  return buf;
}

// ---------------------------------------------------------------------------
// Results

int CellResult::ok_seeds() const {
  int n = 0;
  for (const auto& s : seeds) n += s.ok ? 1 : 0;
  return n;
}

double CellResult::mean_rate() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : seeds) {
    if (!s.ok) continue;
    sum += s.report.rate();
    ++n;
  }
  return n ? sum / n : 0.0;
}

std::optional<double> CellResult::mean_max_force() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : seeds) {
    if (!s.ok || s.report.force.used == 0) continue;
    sum += s.report.force.mean_max_force;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

double CellResult::mean_final_reward() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : seeds) {
    if (!s.ok) continue;
    sum += s.final_reward;
    ++n;
  }
  return n ? sum / n : 0.0;
}

const SeedResult* CellResult::seed(std::uint64_t s) const {
  for (const auto& r : seeds) {
    if (r.seed == s) return &r;
  }
  return nullptr;
}

const CellResult& MatrixResult::cell(const std::string& name) const {
  for (const auto& c : cells) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no cell '" + name + "' in the matrix result");
}

const PoohResult* MatrixResult::pooh_for(std::uint64_t seed) const {
  for (const auto& p : pooh) {
    if (p.seed == seed) return &p;
  }
  return nullptr;
}

void MatrixResult::write_comparison_csv(std::ostream& out) const {
  out << "cell,seed,status,trials,successes,rate,ci_lo,ci_hi,force_trials,mean_max_force,initial_reward,"
         "final_reward,run\n";
  for (const auto& c : cells) {
    for (const auto& s : c.seeds) {
      out << c.name << ',' << s.seed << ',' << (s.ok ? "ok" : "failed") << ',';
      if (s.ok) {
        const auto& r = s.report;
        out << r.trials_total << ',' << r.successes_total << ',' << format_double(r.rate()) << ','
            << format_double(r.ci.lo) << ',' << format_double(r.ci.hi) << ',' << r.force.used << ','
            << format_double(r.force.mean_max_force) << ',';
      } else {
        out << ",,,,,,,";
      }
      out << format_double(s.initial_reward) << ',' << format_double(s.final_reward) << ',' << s.run << '\n';
    }
  }
}

void MatrixResult::write_summary_csv(std::ostream& out) const {
  out << "cell,seeds_ok,seeds_failed,mean_rate,pooled_successes,pooled_trials,ci_lo,ci_hi,mean_max_force,"
         "mean_final_reward\n";
  for (const auto& c : cells) {
    const int ok = c.ok_seeds();
    out << c.name << ',' << ok << ',' << static_cast<int>(c.seeds.size()) - ok << ','
        << format_double(c.mean_rate()) << ',';
    if (c.merged) {
      out << c.merged->successes_total << ',' << c.merged->trials_total << ',' << format_double(c.merged->ci.lo)
          << ',' << format_double(c.merged->ci.hi) << ',';
    } else {
      out << "0,0,,,";
    }
    const auto f = c.mean_max_force();
    out << (f ? format_double(*f) : std::string()) << ',' << format_double(c.mean_final_reward()) << '\n';
  }
}

void MatrixResult::write_text(std::ostream& out) const {
  out << "runs: trained " << trained_runs << ", reused " << reused_runs << ", failed " << failed_runs
      << "; PooH policies trained " << pooh_trained << '\n';
  for (const auto& p : pooh) {
    out << "seed " << p.seed << " PooH: ";
    if (!p.ok) {
      out << "failed (" << p.error << ")\n";
      continue;
    }
    out << "reward " << format_double(p.initial_reward) << " -> " << format_double(p.final_reward);
    for (std::size_t i = 0; i < p.collect.objects.size(); ++i) {
      out << ", " << p.collect.objects[i] << ' ' << p.collect.successes[i] << '/' << p.collect.attempts[i];
    }
    out << '\n';
  }
  for (const auto& c : cells) {
    out << c.name << ": mean success " << format_double(100.0 * c.mean_rate()) << "% over " << c.ok_seeds()
        << '/' << c.seeds.size() << " seeds";
    if (c.merged) {
      out << ", pooled " << c.merged->successes_total << '/' << c.merged->trials_total << " CI ["
          << format_double(c.merged->ci.lo) << ", " << format_double(c.merged->ci.hi) << "]";
    }
    if (const auto f = c.mean_max_force()) out << ", mean max force " << format_double(*f) << " N";
    out << '\n';
    for (const auto& s : c.seeds) {
      if (!s.ok) out << "  seed " << s.seed << " failed: " << s.error << '\n';
    }
  }
  out << "Modality ablations zero the masked inputs; encoders keep their shape.\n";
}

// ---------------------------------------------------------------------------
// Matrix

namespace {

const std::vector<std::string> kPoohKeys{"env.", "render.", "tactile.", "pooh.", "experiment.objects",
                                         "experiment.catalog"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<std::string>& collect_keys() {
  static const auto k = with(kPoohKeys, {"experiment.expert_per_object", "experiment.collect_attempts_per_object"});
  return k;
}

const std::vector<std::string>& reverse_keys() {
  static const auto k = with(collect_keys(), {"reversal."});
  return k;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

bool stage_done(const fs::path& dir, const std::string& digest) { return read_text(dir / "digest") == digest + "\n"; }

void mark_done(const fs::path& dir, const std::string& digest) { write_text_file(dir / "digest", digest + "\n"); }

bool needs_expert(const ExperimentConfig& c) {
  switch (c.method) {
    case Method::kDirectRl: return false;
    case Method::kOurs: return !(c.ablation.no_hybrid && c.ablation.no_bc);
    default: return true;
  }
}

rl::TrainLog load_log(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  return rl::TrainLog::read_csv(in);
}

// Per-seed shared artifacts.
class SeedArtifacts {
 public:
  SeedArtifacts(const ExperimentConfig& base, std::uint64_t seed, fs::path dir, MatrixResult& result,
                std::ostream* progress)
      : base_(base), seed_(seed), dir_(std::move(dir)), result_(result), progress_(progress) {}

  PoohResult& pooh() {
    if (pooh_) return *pooh_;
    pooh_ = PoohResult{};
    pooh_->seed = seed_;
    try {
      const fs::path pdir = dir_ / "pooh";
      const std::string digest = stage_digest(base_, kPoohKeys, seed_);
      rl::TrainLog log;
      if (stage_done(pdir, digest)) {
        log = load_log(pdir / "train_log.csv");
        pooh_->reused = true;
      } else {
        say("training PooH policy");
        auto out = train_pooh(base_, seed_);
        out.policy.save(pdir / "policy");
        out.log.save_csv(pdir / "train_log.csv");
        mark_done(pdir, digest);
        log = std::move(out.log);
        ++result_.pooh_trained;
      }
      pooh_->initial_reward = log.empty() ? 0.0 : log.initial_reward();
      pooh_->final_reward = log.empty() ? 0.0 : log.final_reward();
      demos();
      pooh_->ok = true;
    } catch (const std::exception& e) {
      pooh_->error = e.what();
      say(std::string("PooH stage failed: ") + e.what());
    }
    return *pooh_;
  }

  const std::vector<Trajectory>& expert(const ExperimentConfig& cell) {
    PoohResult& p = pooh();
    if (!p.ok) throw std::runtime_error("PooH stage failed: " + p.error);
    const std::string digest = stage_digest(cell, reverse_keys(), seed_);
    auto it = expert_.find(digest);
    if (it != expert_.end()) return it->second;
    const fs::path rdir = dir_ / ("expert_" + digest);
    std::vector<Trajectory> data;
    if (stage_done(rdir, digest)) {
      data = read_dataset(rdir / "expert.pihd");
    } else {
      say("reversing demonstrations (ratio " + format_double(experiment_reversal(cell).randomized_fraction) + ")");
      ReversalSummary summary;
      data = reverse(demos(), cell, seed_, &summary);
      fs::create_directories(rdir);
      write_dataset(rdir / "expert.pihd", data);
      write_text_file(rdir / "summary.txt", summary.line() + "\n");
      mark_done(rdir, digest);
    }
    return expert_.emplace(digest, std::move(data)).first->second;
  }

 private:
  const std::vector<Trajectory>& demos() {
    if (demos_) return *demos_;
    const fs::path cdir = dir_ / "demos";
    const std::string digest = stage_digest(base_, collect_keys(), seed_);
    if (stage_done(cdir, digest)) {
      demos_ = read_dataset(cdir / "pooh.pihd");
      std::ifstream in(cdir / "collect.csv");
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string name, a, s;
        std::getline(ss, name, ',');
        std::getline(ss, a, ',');
        std::getline(ss, s, ',');
        pooh_->collect.objects.push_back(name);
        pooh_->collect.attempts.push_back(static_cast<int>(parse_int(a).value_or(0)));
        pooh_->collect.successes.push_back(static_cast<int>(parse_int(s).value_or(0)));
      }
    } else {
      say("collecting PooH demonstrations");
      TrainedPolicy policy = TrainedPolicy::load(dir_ / "pooh" / "policy");
      demos_ = collect(policy.policy(), base_, seed_, &pooh_->collect);
      fs::create_directories(cdir);
      write_dataset(cdir / "pooh.pihd", *demos_);
      std::ostringstream csv;
      csv << "object,attempts,successes\n";
      for (std::size_t i = 0; i < pooh_->collect.objects.size(); ++i) {
        csv << pooh_->collect.objects[i] << ',' << pooh_->collect.attempts[i] << ',' << pooh_->collect.successes[i]
            << '\n';
      }
      write_text_file(cdir / "collect.csv", csv.str());
      mark_done(cdir, digest);
    }
    return *demos_;
  }

  void say(const std::string& msg) {
    if (progress_) *progress_ << "[seed " << seed_ << "] " << msg << std::endl;
  }

  const ExperimentConfig& base_;
  std::uint64_t seed_;
  fs::path dir_;
  MatrixResult& result_;
  std::ostream* progress_;
  std::optional<PoohResult> pooh_;
  std::optional<std::vector<Trajectory>> demos_;
  std::map<std::string, std::vector<Trajectory>> expert_;
};

}  // namespace

MatrixResult run_ablation_matrix(const MatrixConfig& mc) {
  mc.base.validate();
  if (mc.out.empty()) throw std::invalid_argument("ablation matrix needs an output directory");
  std::vector<const CellSpec*> specs;
  if (mc.cells.empty()) {
    for (const auto& c : standard_cells()) specs.push_back(&c);
  } else {
    for (const auto& name : mc.cells) specs.push_back(&find_cell(name));
  }
  // Configurations are checked before any training.
  std::vector<ExperimentConfig> configs;
  for (const CellSpec* s : specs) configs.push_back(s->apply(mc.base));

  MatrixResult result;
  for (const CellSpec* s : specs) result.cells.push_back(CellResult{s->name, {}, std::nullopt});

  for (std::uint64_t seed : mc.base.seeds) {
    const fs::path sdir = mc.out / ("seed_" + std::to_string(seed));
    SeedArtifacts art(mc.base, seed, sdir, result, mc.progress);
    result.pooh.push_back(art.pooh());

    for (std::size_t i = 0; i < specs.size(); ++i) {
      const ExperimentConfig& cell = configs[i];
      SeedResult sr;
      sr.seed = seed;
      sr.run = stage_digest(cell, {""}, seed);
      const fs::path rdir = sdir / "runs" / sr.run;
      try {
        if (stage_done(rdir, sr.run)) {
          sr.report = EvalReport::load(rdir / "report", cell.force_successes);
          sr.reused = true;
          ++result.reused_runs;
        } else {
          if (mc.progress) *mc.progress << "[seed " << seed << "] cell " << specs[i]->name << std::endl;
          static const std::vector<Trajectory> kNone;
          const auto& expert = needs_expert(cell) ? art.expert(cell) : kNone;
          auto out = train_pih(cell, seed, expert);
          out.policy.save(rdir / "policy");
          out.log.save_csv(rdir / "train_log.csv");
          sr.report = evaluate_policy(out.policy, cell, seed);
          sr.report.save(rdir / "report");
          std::ofstream cfg_out(rdir / "config.txt");
          write_config(cfg_out, cell);
          mark_done(rdir, sr.run);
          ++result.trained_runs;
        }
        const rl::TrainLog log = load_log(rdir / "train_log.csv");
        if (!log.empty()) {
          sr.initial_reward = log.initial_reward();
          sr.final_reward = log.final_reward();
        }
        sr.ok = true;
      } catch (const std::exception& e) {
        sr.error = e.what();
        write_text_file(rdir / "error.txt", sr.error + "\n");
        ++result.failed_runs;
        if (mc.progress) *mc.progress << "[seed " << seed << "] cell " << specs[i]->name << " failed: " << sr.error
                                      << std::endl;
      }
      result.cells[i].seeds.push_back(std::move(sr));
    }
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::vector<const EvalReport*> reports;
    for (const auto& s : result.cells[i].seeds) {
      if (s.ok) reports.push_back(&s.report);
    }
    if (!reports.empty()) result.cells[i].merged = merge_reports(reports, configs[i].force_successes);
    if (result.cells[i].merged) result.cells[i].merged->save(mc.out / "cells" / specs[i]->name);
  }

  fs::create_directories(mc.out);
  std::ofstream cmp(mc.out / "comparison.csv");
  result.write_comparison_csv(cmp);
  std::ofstream sum(mc.out / "comparison_summary.csv");
  result.write_summary_csv(sum);
  std::ofstream txt(mc.out / "summary.txt");
  result.write_text(txt);
  return result;
}

}  // namespace pih
