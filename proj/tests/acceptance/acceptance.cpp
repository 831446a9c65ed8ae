// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// thresholds are pinned below; nothing is read from the environment.

#include <CLI11.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pih/core/dataset.hpp"
#include "pih/harness/ablation.hpp"
#include "pih/harness/config.hpp"
#include "pih/harness/pipeline.hpp"
#include "pih/harness/wilson.hpp"
#include "pih/nn/gradcheck.hpp"
#include "pih/reversal/reversal.hpp"
#include "pih/rl/point_goal_env.hpp"
#include "pih/rl/trainer.hpp"
#include "pih/sensors/pca.hpp"

#ifndef PIH_CLI_PATH
#define PIH_CLI_PATH "pih"
#endif

using namespace pih;
namespace fs = std::filesystem;

namespace {

// ---- pinned thresholds ------------------------------------------------------

constexpr int kReversalTrajectories = 1000;
constexpr double kReversalFraction = 0.5;
constexpr double kClosureTolerance = 1e-9;
constexpr double kFractionSigmas = 3.0;
constexpr double kReversalSeconds = 60.0;

constexpr int kRewardPairs = 10000;
constexpr double kRewardRelTolerance = 1e-12;

constexpr double kGradTolerance = 1e-4;
constexpr double kGradSeconds = 60.0;

constexpr long kPointGoalSteps = 20000;
constexpr int kPointGoalEvalEpisodes = 100;
constexpr double kPointGoalSuccess = 0.9;
constexpr double kPointGoalSeconds = 600.0;

constexpr int kSeedsAgreeing = 4;
constexpr double kTransferMargin = 0.10;
constexpr double kMatrixSeconds = 7200.0;

constexpr double kWilsonTolerance = 1e-9;

constexpr double kPcaOrthoTolerance = 1e-8;
constexpr double kPcaReconTolerance = 1e-9;

constexpr long kDeterminismSteps = 2000;

const std::vector<std::uint64_t> kSeeds{0, 25, 50, 75, 100};

// ---- reporting --------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1: reversal identities -------------------------------------------------

double pose_error(const Pose& a, const Pose& b) {
  const auto x = a.to_array();
  const auto y = b.to_array();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

Outcome reversal_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = desk_config();
  cfg.expert_per_object = kReversalTrajectories / static_cast<int>(cfg.objects.size());
  cfg.collect_attempts_per_object = 2 * cfg.expert_per_object;
  cfg.reversal.randomized_fraction = kReversalFraction;

  // Noisy oracle extractions: the lateral jitter scrapes the hole walls.
  rl::PegHoleAdapter pooh_env(task_env(cfg, Task::kPooH), experiment_pairs(cfg));
  ScriptedExtractionPolicy extractor(pooh_env, 0.5, 11);
  const std::vector<Trajectory> pooh = collect(extractor, pooh_env, cfg, 11);
  if (static_cast<int>(pooh.size()) != kReversalTrajectories) {
    return {false, "collected " + std::to_string(pooh.size()) + " of " +
                       std::to_string(kReversalTrajectories) + " extractions"};
  }

  ReversalSummary summary;
  const std::vector<Trajectory> pih = reverse(pooh, cfg, 11, &summary);

  long pairs = 0;
  long sum_violations = 0;
  long once_violations = 0;
  long closure_checked = 0;
  long after_contact = 0;
  double closure_worst = 0.0;
  const ObjectCatalog catalog = experiment_catalog(cfg);
  std::map<std::string, std::unique_ptr<PegHoleEnv>> envs;
  for (std::size_t n = 0; n < pih.size(); ++n) {
    const Trajectory& src = pooh[n];
    const Trajectory& out = pih[n];
    const std::size_t T = src.transitions.size();
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < out.transitions.size(); ++i) {
      if (out.transitions[i].randomized) flagged.push_back(i);
    }
    const bool randomized = !flagged.empty();
    if (randomized) {
      const bool shape = flagged.size() == 2 && flagged[1] == flagged[0] + 1 && out.transitions.size() == T + 1;
      if (!shape) {
        ++once_violations;
        continue;
      }
      ++pairs;
      const std::size_t i = flagged[0];
      const Action& a1 = out.transitions[i].action;
      const Action& a2 = out.transitions[i + 1].action;
      const Action& at = src.transitions[T - 1 - i].action;
      for (int j = 0; j < kActionDim; ++j) {
        if (a1[j] + a2[j] + at[j] != 0.0 || a1[j] + a2[j] != -at[j]) ++sum_violations;
      }
    } else if (out.transitions.size() != T) {
      ++once_violations;
    }

    // Kinematic closure: replay every record. A record lies on a
    // contact-free segment when neither it nor the record that produced its
    // start pose touches anything; there it must land on the recorded pose.
    // A recover step that starts from a blocked poke cannot: the poke fell
    // short of its command, and the recover command is fixed by a' + a'' = -a_t.
    auto& env = envs[out.object_id];
    if (!env) {
      EnvConfig e = task_env(cfg, Task::kPiH);
      env = std::make_unique<PegHoleEnv>(e, catalog.get(out.object_id));
    }
    RandomStream s(static_cast<std::uint64_t>(out.seed));
    env->reset(s);
    bool previous_contact = false;
    for (const Transition& rec : out.transitions) {
      env->teleport(rec.obs.k);
      const auto r = env->step(rec.action);
      const bool contact = r.state.contact_force != 0.0;
      if (!contact && previous_contact) ++after_contact;
      if (!contact && !previous_contact) {
        ++closure_checked;
        closure_worst = std::max(closure_worst, pose_error(r.state.peg_pose, rec.next_obs.k));
      }
      previous_contact = contact;
    }
  }

  const double n = static_cast<double>(summary.input);
  const double fraction = static_cast<double>(summary.randomized) / n;
  const double se = std::sqrt(kReversalFraction * (1.0 - kReversalFraction) / n);
  const double elapsed = seconds_since(t0);
  const bool pass = sum_violations == 0 && once_violations == 0 && pairs == summary.randomized &&
                    closure_worst <= kClosureTolerance && closure_checked > 0 &&
                    std::abs(fraction - kReversalFraction) <= kFractionSigmas * se &&
                    elapsed < kReversalSeconds;
  return {pass, summary.line() + ", pairs " + std::to_string(pairs) + ", sum violations " +
                    std::to_string(sum_violations) + ", once violations " + std::to_string(once_violations) +
                    ", closure max " + num(closure_worst, 3) + " over " + std::to_string(closure_checked) +
                    " contact-free steps (" + std::to_string(after_contact) +
                    " free steps after contact excluded), fraction " + num(fraction) + " (|z| " +
                    num(std::abs(fraction - kReversalFraction) / se, 3) + " SE), " + num(elapsed, 3) + " s"};
}

// ---- 2: reward oracle -------------------------------------------------------

Outcome reward_oracle() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(-1.5, 1.5);
  auto pose = [&] { return Pose{pos(rng), pos(rng), pos(rng), ang(rng), ang(rng), ang(rng)}; };
  double worst = 0.0;
  for (int i = 0; i < kRewardPairs; ++i) {
    EnvState s;
    s.peg_pose = pose();
    s.hole_pose = pose();
    const GoalSpec g{pose(), pose()};
    // Brute force in extended precision over all twelve coordinates.
    const std::array<Pose, 4> p{s.peg_pose, s.hole_pose, g.goal_peg, g.goal_hole};
    long double acc = 0.0L;
    for (int side = 0; side < 2; ++side) {
      const auto a = p[static_cast<std::size_t>(side)].to_array();
      const auto b = p[static_cast<std::size_t>(side + 2)].to_array();
      for (std::size_t j = 0; j < a.size(); ++j) {
        const long double d = static_cast<long double>(a[j]) - static_cast<long double>(b[j]);
        acc += d * d;
      }
    }
    const double want = static_cast<double>(-acc);
    const double got = reward(s, g);
    worst = std::max(worst, std::abs(got - want) / std::max(std::abs(want), 1e-300));
  }
  return {worst <= kRewardRelTolerance,
          std::to_string(kRewardPairs) + " pairs, max relative error " + num(worst, 3)};
}

// ---- 3: gradient check ------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& r : nn::gradcheck_all(0)) {
    ok = ok && r.max_rel_error < kGradTolerance && r.checked > 0;
    detail += r.name + " " + num(r.max_rel_error, 3) + ", ";
  }
  const double elapsed = seconds_since(t0);
  return {ok && elapsed < kGradSeconds, detail + num(elapsed, 3) + " s"};
}

// ---- 4: SAC point goal ------------------------------------------------------

Outcome sac_point_goal() {
  const auto t0 = std::chrono::steady_clock::now();
  int solved = 0;
  std::string detail;
  for (std::uint64_t seed : kSeeds) {
    rl::PointGoalEnv env;
    rl::TrainConfig tc;
    tc.total_steps = kPointGoalSteps;
    tc.seed = seed;
    rl::TrainResult r = rl::train_sac(env, tc);
    rl::PointGoalEnv eval_env;
    RandomStream unused(seed);
    int successes = 0;
    for (int ep = 0; ep < kPointGoalEvalEpisodes; ++ep) {
      auto obs = eval_env.reset(rl::episode_seed(seed + 1000003, static_cast<std::uint64_t>(ep)));
      for (;;) {
        const auto step = eval_env.step(r.agent->act(*obs, unused, true));
        obs = step.obs;
        if (step.done) {
          successes += step.success ? 1 : 0;
          break;
        }
      }
    }
    const double rate = static_cast<double>(successes) / kPointGoalEvalEpisodes;
    solved += rate > kPointGoalSuccess ? 1 : 0;
    detail += "seed " + std::to_string(seed) + " " + num(rate, 3) + ", ";
  }
  const double elapsed = seconds_since(t0);
  return {solved >= kSeedsAgreeing && elapsed < kPointGoalSeconds,
          detail + std::to_string(solved) + "/5 above " + num(kPointGoalSuccess) + ", " + num(elapsed, 4) + " s"};
}

// ---- 5-9: comparison matrix -------------------------------------------------

struct Matrix {
  MatrixResult result;
  double seconds = 0.0;
};

Matrix run_matrix(const fs::path& out, const std::vector<std::uint64_t>& seeds) {
  MatrixConfig mc;
  mc.base = desk_config();
  mc.base.seeds = seeds;
  mc.cells = {"ours", "direct_rl", "ratio_0", "no_hybrid", "no_bc", "no_vision", "no_tactile"};
  mc.out = out;
  mc.progress = &std::cerr;
  const auto t0 = std::chrono::steady_clock::now();
  Matrix m;
  m.result = run_ablation_matrix(mc);
  m.seconds = seconds_since(t0);
  return m;
}

double rate_of(const CellResult& c, std::uint64_t seed) {
  const SeedResult* s = c.seed(seed);
  return s && s->ok ? s->report.rate() : 0.0;
}

std::string failures(const CellResult& c) {
  const int bad = static_cast<int>(c.seeds.size()) - c.ok_seeds();
  return bad ? " [" + c.name + ": " + std::to_string(bad) + " failed seeds]" : "";
}

Outcome pooh_easier(const Matrix& m, const std::vector<std::uint64_t>& seeds) {
  const CellResult& direct = m.result.cell("direct_rl");
  double pooh_sum = 0.0;
  double pih_sum = 0.0;
  int agree = 0;
  int counted = 0;
  std::string detail;
  for (std::uint64_t seed : seeds) {
    const PoohResult* p = m.result.pooh_for(seed);
    const SeedResult* d = direct.seed(seed);
    if (!p || !p->ok || !d || !d->ok) {
      detail += "seed " + std::to_string(seed) + " missing, ";
      continue;
    }
    ++counted;
    pooh_sum += p->final_reward;
    pih_sum += d->final_reward;
    agree += p->final_reward > d->final_reward ? 1 : 0;
    detail += "seed " + std::to_string(seed) + " " + num(p->final_reward) + " vs " + num(d->final_reward) + ", ";
  }
  if (counted == 0) return {false, "no completed seeds"};
  const double pooh = pooh_sum / counted;
  const double pih = pih_sum / counted;
  return {counted == static_cast<int>(seeds.size()) && pooh > pih && agree >= kSeedsAgreeing,
          "final reward PooH " + num(pooh) + " vs direct-RL PiH " + num(pih) + ", " + std::to_string(agree) +
              "/" + std::to_string(seeds.size()) + " seeds agree (" + detail + ")"};
}

Outcome transfer(const Matrix& m, const std::vector<std::uint64_t>& seeds) {
  const CellResult& ours = m.result.cell("ours");
  const CellResult& direct = m.result.cell("direct_rl");
  int positive = 0;
  double diff_sum = 0.0;
  std::string detail;
  for (std::uint64_t seed : seeds) {
    const double d = rate_of(ours, seed) - rate_of(direct, seed);
    diff_sum += d;
    positive += d > 0.0 ? 1 : 0;
    detail += num(rate_of(ours, seed), 3) + "/" + num(rate_of(direct, seed), 3) + " ";
  }
  const double mean_diff = diff_sum / static_cast<double>(seeds.size());
  const bool pass = mean_diff >= kTransferMargin && positive >= kSeedsAgreeing && m.seconds < kMatrixSeconds;
  return {pass, "ours " + num(ours.mean_rate(), 3) + " vs direct_rl " + num(direct.mean_rate(), 3) + ", mean diff " +
                    num(100.0 * mean_diff, 3) + " pp, positive on " + std::to_string(positive) + "/" +
                    std::to_string(seeds.size()) + " seeds (per seed ours/direct: " + detail + "), matrix " +
                    num(m.seconds, 5) + " s" + failures(ours) + failures(direct)};
}

Outcome randomization_ratio(const Matrix& m, const std::vector<std::uint64_t>& seeds) {
  const CellResult& r50 = m.result.cell("ours");
  const CellResult& r0 = m.result.cell("ratio_0");
  int ge = 0;
  for (std::uint64_t seed : seeds) ge += rate_of(r50, seed) >= rate_of(r0, seed) ? 1 : 0;
  const bool pass = r50.mean_rate() > r0.mean_rate() && ge == static_cast<int>(seeds.size());
  return {pass, "ratio_50 " + num(r50.mean_rate(), 3) + " vs ratio_0 " + num(r0.mean_rate(), 3) + ", >= on " +
                    std::to_string(ge) + "/" + std::to_string(seeds.size()) + " seeds" + failures(r0)};
}

Outcome hybrid_bc(const Matrix& m) {
  const double full = m.result.cell("ours").mean_rate();
  const double nh = m.result.cell("no_hybrid").mean_rate();
  const double nb = m.result.cell("no_bc").mean_rate();
  return {nh <= full && nb <= full, "ours " + num(full, 3) + ", no_hybrid " + num(nh, 3) + ", no_bc " + num(nb, 3) +
                                        failures(m.result.cell("no_hybrid")) + failures(m.result.cell("no_bc"))};
}

Outcome modality_force(const Matrix& m) {
  const auto both = m.result.cell("ours").mean_max_force();
  const auto nv = m.result.cell("no_vision").mean_max_force();
  const auto nt = m.result.cell("no_tactile").mean_max_force();
  auto show = [](const std::optional<double>& f) { return f ? num(*f) + " N" : std::string("n/a (no successes)"); };
  const bool pass = both && nv && nt && *both <= *nv && *both <= *nt;
  return {pass, "mean max force vision+tactile " + show(both) + ", no_vision " + show(nv) + ", no_tactile " + show(nt)};
}

// ---- 10: Wilson -------------------------------------------------------------

Outcome wilson_grid() {
  const std::vector<long> totals{1, 2, 3, 5, 8, 13, 20, 50, 100, 1000};
  double worst = 0.0;
  int cases = 0;
  bool bounds = true;
  for (long N : totals) {
    // 20 cases per N: every count when N < 20, otherwise 20 spread counts
    // including 0 and N; small N cycles through several z values.
    std::vector<long> list;
    if (N < 20) {
      for (long n = 0; n <= N; ++n) list.push_back(n);
    } else {
      for (long i = 0; i < 20; ++i) list.push_back(N * i / 19);
    }
    const std::vector<double> zs{1.96, 1.0, 2.576, 1.645, 3.0};
    for (int c = 0; c < 20; ++c) {
      const long n = list[static_cast<std::size_t>(c) % list.size()];
      const double z = zs[(static_cast<std::size_t>(c) / list.size()) % zs.size()];
      const Interval got = wilson_ci(n, N, z);
      // Closed form, evaluated independently in extended precision.
      const long double p = static_cast<long double>(n) / N;
      const long double zz = static_cast<long double>(z) * z;
      const long double denom = 1.0L + zz / N;
      const long double centre = (p + zz / (2.0L * N)) / denom;
      const long double half = static_cast<long double>(z) * std::sqrt(p * (1.0L - p) / N + zz / (4.0L * N * N)) / denom;
      worst = std::max({worst, static_cast<double>(std::abs(got.lo - (centre - half))),
                        static_cast<double>(std::abs(got.hi - (centre + half)))});
      bounds = bounds && got.lo <= static_cast<double>(p) && static_cast<double>(p) <= got.hi && got.lo >= 0.0 &&
               got.hi <= 1.0;
      ++cases;
    }
  }
  return {cases == 200 && worst <= kWilsonTolerance && bounds,
          std::to_string(cases) + " cases, max deviation " + num(worst, 3) + (bounds ? "" : ", bounds violated")};
}

// ---- 11: PCA ----------------------------------------------------------------

Outcome pca_suite() {
  const sensors::TactileConfig tc;
  RandomStream stream(0);
  const sensors::PcaModel m = sensors::fit_pca(sensors::calibration_frames(tc, stream), kTactileDim);
  const Eigen::MatrixXd gram = m.components * m.components.transpose();
  const double ortho = (gram - Eigen::MatrixXd::Identity(m.k(), m.k())).cwiseAbs().maxCoeff();
  bool monotone = true;
  for (int i = 1; i < m.k(); ++i) monotone = monotone && m.explained_variance(i) <= m.explained_variance(i - 1);

  // Samples in a random 15-dimensional affine subspace are reconstructed exactly.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const int R = m.raw_dim();
  Eigen::MatrixXd basis(R, kTactileDim);
  for (int i = 0; i < basis.size(); ++i) basis.data()[i] = g(rng);
  Eigen::VectorXd offset(R);
  for (int i = 0; i < R; ++i) offset(i) = g(rng);
  Eigen::MatrixXd samples(500, R);
  for (int s = 0; s < samples.rows(); ++s) {
    Eigen::VectorXd coef(kTactileDim);
    for (int j = 0; j < kTactileDim; ++j) coef(j) = g(rng);
    samples.row(s) = (offset + basis * coef).transpose();
  }
  const sensors::PcaModel sub = sensors::fit_pca(samples, kTactileDim);
  double recon = 0.0;
  for (int s = 0; s < samples.rows(); ++s) {
    const Eigen::VectorXd x = samples.row(s).transpose();
    recon = std::max(recon, (sub.reconstruct(sub.project(x)) - x).norm() / std::max(1.0, x.norm()));
  }
  return {ortho < kPcaOrthoTolerance && monotone && recon < kPcaReconTolerance,
          "orthonormality " + num(ortho, 3) + ", variance non-increasing " + (monotone ? "yes" : "no") +
              ", subspace reconstruction " + num(recon, 3)};
}

// ---- 12: determinism --------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + PIH_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& work) {
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string common = "--desk --deterministic --seed 0 --set pih.steps=" +
                             std::to_string(kDeterminismSteps) + " --set experiment.expert_per_object=10";
  const fs::path pooh = work / "pooh.pihd";
  const fs::path expert = work / "expert.pihd";
  if (run_cli(common + " --out \"" + pooh.string() + "\" collect --scripted", work / "collect.log") != 0 ||
      run_cli(common + " --out \"" + expert.string() + "\" reverse --in \"" + pooh.string() + "\"",
              work / "reverse.log") != 0) {
    return {false, "could not prepare the expert dataset, see " + work.string()};
  }
  for (const char* run : {"a", "b"}) {
    const fs::path dir = work / run;
    if (run_cli(common + " --out \"" + dir.string() + "\" train-pih --dataset \"" + expert.string() + "\"",
                work / (std::string(run) + ".log")) != 0) {
      return {false, std::string("train-pih run ") + run + " failed, see " + work.string()};
    }
  }
  const std::string a = slurp(work / "a" / "train_log.csv");
  const std::string b = slurp(work / "b" / "train_log.csv");
  const long rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {!a.empty() && a == b && rows == kDeterminismSteps,
          std::to_string(rows) + " log rows, CSVs " + (a == b ? "identical" : "differ") + " (" +
              std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  bool quick = false;
  std::vector<int> only;
  std::string out = "acceptance_out";
  std::vector<std::uint64_t> seeds = kSeeds;
  app.add_flag("--quick", quick, "Skip the SAC and matrix criteria (4-9)");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 12));
  app.add_option("--out", out, "Work directory (the matrix under it is resumable)");
  CLI11_PARSE(app, argc, argv);
  Eigen::setNbThreads(1);

  auto wanted = [&](int c) {
    if (!only.empty()) return std::find(only.begin(), only.end(), c) != only.end();
    return !quick || c <= 3 || c >= 10;
  };

  const std::map<int, std::string> names{
      {1, "reversal identities"}, {2, "reward oracle"},        {3, "gradient check"},
      {4, "SAC point goal"},      {5, "PooH easier than PiH"}, {6, "transfer over direct RL"},
      {7, "randomization ratio"}, {8, "hybrid replay and BC"}, {9, "modality contact force"},
      {10, "Wilson interval"},    {11, "tactile PCA"},         {12, "determinism"}};

  const fs::path work(out);
  std::optional<Matrix> matrix;
  auto need_matrix = [&]() -> const Matrix& {
    if (!matrix) matrix = run_matrix(work / "matrix", seeds);
    return *matrix;
  };

  int failed = 0;
  for (const auto& [c, name] : names) {
    if (!wanted(c)) continue;
    Outcome o;
    try {
      switch (c) {
        case 1: o = reversal_identities(); break;
        case 2: o = reward_oracle(); break;
        case 3: o = gradient_check(); break;
        case 4: o = sac_point_goal(); break;
        case 5: o = pooh_easier(need_matrix(), seeds); break;
        case 6: o = transfer(need_matrix(), seeds); break;
        case 7: o = randomization_ratio(need_matrix(), seeds); break;
        case 8: o = hybrid_bc(need_matrix()); break;
        case 9: o = modality_force(need_matrix()); break;
        case 10: o = wilson_grid(); break;
        case 11: o = pca_suite(); break;
        case 12: o = determinism(work / "determinism"); break;
        default: break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c << "  " << name << ": " << o.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
