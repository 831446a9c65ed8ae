#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "pih/core/dataset.hpp"
#include "pih/harness/ablation.hpp"
#include "pih/harness/config.hpp"
#include "pih/harness/evaluate.hpp"
#include "pih/harness/pipeline.hpp"
#include "pih/harness/wilson.hpp"

namespace pih {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pih_harness_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---- Wilson ----------------------------------------------------------------

// Roots of (p_hat - p)^2 = z^2 p (1 - p) / N, the defining inequality of the score interval.
Interval wilson_roots(long n, long total, double z) {
  const double N = static_cast<double>(total);
  const double ph = static_cast<double>(n) / N;
  const double a = 1.0 + z * z / N;
  const double b = -(2.0 * ph + z * z / N);
  const double c = ph * ph;
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  return {(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
}

TEST(Wilson, MatchesQuadraticRoots) {
  for (long total : {1L, 2L, 5L, 20L, 37L, 100L, 1000L}) {
    for (long n = 0; n <= total; n += std::max(1L, total / 9)) {
      for (double z : {1.0, 1.96, 2.576}) {
        const Interval got = wilson_ci(n, total, z);
        const Interval want = wilson_roots(n, total, z);
        EXPECT_NEAR(got.lo, want.lo, 1e-9) << n << "/" << total;
        EXPECT_NEAR(got.hi, want.hi, 1e-9) << n << "/" << total;
        const double p = static_cast<double>(n) / static_cast<double>(total);
        EXPECT_LE(got.lo, p);
        EXPECT_GE(got.hi, p);
        EXPECT_GE(got.lo, 0.0);
        EXPECT_LE(got.hi, 1.0);
      }
    }
  }
}

TEST(Wilson, Boundaries) {
  EXPECT_EQ(wilson_ci(0, 20).lo, 0.0);
  EXPECT_EQ(wilson_ci(20, 20).hi, 1.0);
  const Interval i = wilson_ci(18, 20);
  const double z = 1.96, N = 20, p = 0.9;
  const double centre = (p + z * z / (2 * N)) / (1 + z * z / N);
  const double half = z * std::sqrt(p * (1 - p) / N + z * z / (4 * N * N)) / (1 + z * z / N);
  EXPECT_NEAR(i.lo, centre - half, 1e-12);
  EXPECT_NEAR(i.hi, centre + half, 1e-12);
  EXPECT_THROW(wilson_ci(0, 0), std::invalid_argument);
  EXPECT_THROW(wilson_ci(3, 2), std::invalid_argument);
  EXPECT_THROW(wilson_ci(-1, 2), std::invalid_argument);
}

// ---- configuration ---------------------------------------------------------

TEST(Config, WriteParseRoundTrip) {
  ExperimentConfig c = desk_config();
  c.method = Method::kOurs;
  c.ablation.no_bc = true;
  c.objects = {"cube", "hexagon"};
  c.seeds = {3, 9};
  c.env.friction = 0.123456789;
  c.pih.sac.target_entropy = -3.5;
  c.pih.sac.target_entropy_set = true;
  std::stringstream io;
  write_config(io, c);
  const ExperimentConfig back = parse_config(io);
  EXPECT_EQ(back.digest(), c.digest());
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(again.str(), io.str());
  EXPECT_EQ(back.objects, c.objects);
  EXPECT_EQ(back.env.friction, c.env.friction);
}

TEST(Config, EveryKeyIsWritten) {
  std::ostringstream out;
  write_config(out, ExperimentConfig{});
  for (const auto& key : config_keys()) EXPECT_NE(out.str().find(key + " = "), std::string::npos) << key;
}

int error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_EQ(error_line("# comment\nenv.friction = 0.2\nenv.bogus = 1\n"), 3);
  EXPECT_EQ(error_line("env.friction = 0.2\n\nenv.friction = 0.3\n"), 3);
  EXPECT_EQ(error_line("env.friction = abc\n"), 1);
  EXPECT_EQ(error_line("just some words\n"), 1);
  EXPECT_EQ(error_line("experiment.method = teleport\n"), 1);
  EXPECT_EQ(error_line("env.episode_len = 20  # trailing comment\n"), -1);
}

TEST(Config, AblationFlagsRequireOurs) {
  EXPECT_EQ(error_line("experiment.method = sl\nexperiment.no_bc = true\n"), 0);
  EXPECT_EQ(error_line("experiment.method = ours\nexperiment.no_bc = true\n"), -1);
  ExperimentConfig c;
  c.method = Method::kDirectRl;
  c.ablation.no_vision = true;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, SetValueAndDigest) {
  ExperimentConfig c;
  const std::string before = c.digest();
  set_config_value(c, "pih.lr", "0.001");
  EXPECT_EQ(c.pih.sac.lr, 0.001);
  EXPECT_NE(c.digest(), before);
  EXPECT_THROW(set_config_value(c, "nope", "1"), ConfigError);
  EXPECT_EQ(method_from_string(to_string(Method::kResidual)), Method::kResidual);
}

// ---- evaluation ------------------------------------------------------------

ExperimentConfig tiny_config() {
  ExperimentConfig c = desk_config();
  c.objects = {"cube"};
  c.seeds = {0};
  c.trials_per_object = 2;
  c.force_successes = 2;
  c.pooh.total_steps = 150;
  c.pih.total_steps = 150;
  for (rl::TrainConfig* t : {&c.pooh, &c.pih}) {
    t->warmup_steps = 50;
    t->update_after = 50;
    t->vec_hidden = 16;
    t->fusion_hidden = 16;
    t->conv1 = 2;
    t->conv2 = 2;
    t->sac.critic_hidden = 16;
    t->sac.batch_size = 16;
    t->bc_batch = 16;
  }
  c.expert_per_object = 2;
  c.collect_attempts_per_object = 2;
  c.sl.epochs = 5;
  return c;
}

TEST(Evaluate, ScriptedPolicySucceedsWithoutForce) {
  EnvConfig env_cfg = task_env(desk_config(), Task::kPiH);
  env_cfg.clearance = 0.002;
  const auto cat = ObjectCatalog::default_catalog();
  rl::PegHoleAdapter env(env_cfg, {cat.get("cube"), cat.get("d_shape")});
  ScriptedInsertionPolicy policy(env);
  const EvalReport r = evaluate(policy, env.encoder_spec(), env, EvalConfig{10, 5, 1});
  EXPECT_EQ(r.trials_total, 20);
  EXPECT_EQ(r.successes_total, 20);
  EXPECT_EQ(r.rate(), 1.0);
  EXPECT_EQ(r.ci.hi, 1.0);
  ASSERT_EQ(r.objects.size(), 2u);
  for (const auto& o : r.objects) {
    EXPECT_EQ(o.successes, 10);
    EXPECT_EQ(o.ci.hi, 1.0);
  }
  for (const auto& t : r.trials) EXPECT_LE(t.max_force(), 1e-9) << t.object << " " << t.trial;
  EXPECT_EQ(r.force.used, 5);
  EXPECT_FALSE(r.force.flagged());
}

TEST(Evaluate, NullPolicyNeverSucceeds) {
  const auto cat = ObjectCatalog::default_catalog();
  rl::PegHoleAdapter env(task_env(desk_config(), Task::kPiH), {cat.get("cube")});
  NullPolicy policy(kActionDim);
  const EvalReport r = evaluate(policy, env.encoder_spec(), env, EvalConfig{5, 3, 2});
  EXPECT_EQ(r.successes_total, 0);
  EXPECT_EQ(r.ci.lo, 0.0);
  EXPECT_EQ(r.force.used, 0);
  EXPECT_TRUE(r.force.flagged());
  for (const auto& t : r.trials) EXPECT_EQ(t.steps, env.env().config().episode_len);
}

TEST(Evaluate, ReportsAreDeterministicAndPersist) {
  const auto cat = ObjectCatalog::default_catalog();
  rl::PegHoleAdapter env(task_env(desk_config(), Task::kPiH), {cat.get("cube"), cat.get("hexagon")});
  ScriptedInsertionPolicy policy(env);
  const EvalReport a = evaluate(policy, env.encoder_spec(), env, EvalConfig{4, 2, 9});
  const EvalReport b = evaluate(policy, env.encoder_spec(), env, EvalConfig{4, 2, 9});
  EXPECT_TRUE(a == b);
  const fs::path dir = scratch("report");
  a.save(dir);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  EXPECT_TRUE(EvalReport::load(dir, 2) == a);
}

TEST(Evaluate, ShapeMismatchIsRejected) {
  const auto cat = ObjectCatalog::default_catalog();
  rl::PegHoleAdapter env(task_env(desk_config(), Task::kPiH), {cat.get("cube")});
  NullPolicy policy(kActionDim);
  nn::EncoderSpec wrong = env.encoder_spec();
  wrong.image_h = 32;
  EXPECT_THROW(evaluate(policy, wrong, env, EvalConfig{}), std::invalid_argument);
}

TEST(Evaluate, ForceAggregateUsesFirstSuccesses) {
  std::vector<TrialRecord> trials(5);
  for (int i = 0; i < 5; ++i) {
    trials[static_cast<std::size_t>(i)].object = "cube";
    trials[static_cast<std::size_t>(i)].trial = i;
    trials[static_cast<std::size_t>(i)].success = i != 1;
    trials[static_cast<std::size_t>(i)].force = {0.0, static_cast<double>(i + 1)};
  }
  std::vector<const TrialRecord*> ptrs;
  for (const auto& t : trials) ptrs.push_back(&t);
  const ForceAggregate f = aggregate_forces(ptrs, 2);
  EXPECT_EQ(f.used, 2);
  // Trials 0 and 2: max forces 1 and 3, mean forces 0.5 and 1.5.
  EXPECT_DOUBLE_EQ(f.mean_max_force, 2.0);
  EXPECT_DOUBLE_EQ(f.mean_force, 1.0);
  const ForceAggregate all = aggregate_forces(ptrs, 10);
  EXPECT_EQ(all.used, 4);
  EXPECT_TRUE(all.flagged());
}

TEST(Evaluate, MergePoolsTrials) {
  const auto cat = ObjectCatalog::default_catalog();
  rl::PegHoleAdapter env(task_env(desk_config(), Task::kPiH), {cat.get("cube")});
  NullPolicy null_policy(kActionDim);
  ScriptedInsertionPolicy scripted(env);
  const EvalReport a = evaluate(null_policy, env.encoder_spec(), env, EvalConfig{3, 2, 0});
  const EvalReport b = evaluate(scripted, env.encoder_spec(), env, EvalConfig{3, 2, 1});
  const EvalReport m = merge_reports({&a, &b}, 2);
  EXPECT_EQ(m.trials_total, 6);
  EXPECT_EQ(m.successes_total, 3);
  ASSERT_EQ(m.objects.size(), 1u);
  EXPECT_EQ(m.objects[0].trials, 6);
}

// ---- pipeline pieces -------------------------------------------------------

TEST(Pipeline, NoVisionMasksImageWithZeros) {
  ExperimentConfig c = desk_config();
  c.ablation.no_vision = true;
  const auto mods = experiment_modalities(c);
  EXPECT_FALSE(mods.vision);
  EXPECT_TRUE(mods.tactile);
  auto env = pih_adapter(c, mods);
  const auto obs = env->reset(5);
  EXPECT_EQ(static_cast<int>(obs->image.size()), env->encoder_spec().image_dim());
  EXPECT_GT(obs->image.size(), 0u);
  for (float p : obs->image) EXPECT_EQ(p, 0.0f);

  ExperimentConfig t = desk_config();
  t.ablation.no_tactile = true;
  auto tenv = pih_adapter(t, experiment_modalities(t));
  const auto tobs = tenv->reset(5);
  for (int j = 0; j < kTactileDim; ++j) EXPECT_EQ(tobs->vec[static_cast<std::size_t>(kPoseDim + j)], 0.0);
  bool any_pixel = false;
  for (float p : tobs->image) any_pixel = any_pixel || p != 0.0f;
  EXPECT_TRUE(any_pixel);
}

TEST(Pipeline, ScriptedCollectionAndRatioZeroEqualsNoRandomization) {
  ExperimentConfig base = tiny_config();
  base.expert_per_object = 3;
  base.collect_attempts_per_object = 3;
  rl::PegHoleAdapter env(task_env(base, Task::kPooH), experiment_pairs(base));
  ScriptedExtractionPolicy policy(env, 0.5, 1);
  CollectStats stats;
  const auto demos = collect(policy, env, base, 0, &stats);
  ASSERT_EQ(demos.size(), 3u);
  EXPECT_EQ(stats.successes, (std::vector<int>{3}));

  const ExperimentConfig ratio0 = find_cell("ratio_0").apply(base);
  const ExperimentConfig norand = find_cell("no_randomization").apply(base);
  EXPECT_EQ(ratio0.digest(), norand.digest());
  std::ostringstream a;
  std::ostringstream b;
  write_dataset(a, reverse(demos, ratio0, 7));
  write_dataset(b, reverse(demos, norand, 7));
  EXPECT_EQ(a.str(), b.str());
  ReversalSummary sum;
  reverse(demos, ratio0, 7, &sum);
  EXPECT_EQ(sum.randomized, 0);
}

TEST(Pipeline, TrainedPolicyRoundTrips) {
  ExperimentConfig c = tiny_config();
  c.method = Method::kDirectRl;
  TrainOutput out = train_pih(c, 0, {});
  const fs::path dir = scratch("policy");
  out.policy.save(dir);
  TrainedPolicy back = TrainedPolicy::load(dir);
  EXPECT_EQ(back.kind(), TrainedPolicy::Kind::kSac);
  EXPECT_EQ(back.spec(), out.policy.spec());
  auto env = pih_adapter(c, back.modalities());
  const auto obs = env->reset(3);
  EXPECT_EQ(back.policy().act(*obs), out.policy.policy().act(*obs));
}

TEST(Pipeline, OursNeedsDemonstrations) {
  ExperimentConfig c = tiny_config();
  EXPECT_THROW(train_pih(c, 0, {}), std::invalid_argument);
}

// ---- ablation matrix -------------------------------------------------------

TEST(Matrix, CellsFoldEquivalentSettings) {
  const ExperimentConfig base = desk_config();
  EXPECT_EQ(find_cell("ours").apply(base).digest(), find_cell("ratio_50").apply(base).digest());
  EXPECT_NE(find_cell("ours").apply(base).digest(), find_cell("ratio_25").apply(base).digest());
  EXPECT_EQ(find_cell("direct_rl").apply(base).method, Method::kDirectRl);
  EXPECT_TRUE(find_cell("no_vision").apply(base).ablation.no_vision);
  EXPECT_THROW(find_cell("ratio_33"), std::invalid_argument);
  EXPECT_EQ(standard_cells().size(), 14u);
}

TEST(Matrix, SingleCellGivesOneReportAndResumes) {
  MatrixConfig m;
  m.base = tiny_config();
  m.cells = {"direct_rl"};
  m.out = scratch("matrix");
  const MatrixResult first = run_ablation_matrix(m);
  ASSERT_EQ(first.cells.size(), 1u);
  const CellResult& cell = first.cell("direct_rl");
  ASSERT_EQ(cell.seeds.size(), 1u);
  EXPECT_TRUE(cell.seeds[0].ok) << cell.seeds[0].error;
  ASSERT_TRUE(cell.merged.has_value());
  EXPECT_EQ(cell.merged->trials_total, 2);
  EXPECT_EQ(first.trained_runs, 1);
  EXPECT_EQ(first.failed_runs, 0);
  EXPECT_TRUE(fs::exists(m.out / "comparison.csv"));
  EXPECT_TRUE(fs::exists(m.out / "cells" / "direct_rl" / "summary.csv"));

  const MatrixResult second = run_ablation_matrix(m);
  EXPECT_EQ(second.trained_runs, 0);
  EXPECT_EQ(second.pooh_trained, 0);
  EXPECT_EQ(second.reused_runs, 1);
  EXPECT_TRUE(second.cell("direct_rl").seeds[0].reused);
  EXPECT_TRUE(second.cell("direct_rl").seeds[0].report == cell.seeds[0].report);
}

TEST(Matrix, FailingCellIsRecordedAndMatrixContinues) {
  MatrixConfig m;
  m.base = tiny_config();
  m.base.collect_attempts_per_object = 2;
  m.cells = {"ours", "direct_rl"};
  m.out = scratch("matrix_fail");
  const MatrixResult r = run_ablation_matrix(m);
  // A barely trained PooH policy rarely yields demonstrations; either way the
  // matrix must finish and direct RL must not depend on them.
  EXPECT_TRUE(r.cell("direct_rl").seeds[0].ok);
  const auto& ours = r.cell("ours").seeds[0];
  if (!ours.ok) {
    EXPECT_FALSE(ours.error.empty());
    EXPECT_EQ(r.failed_runs, 1);
  }
}

}  // namespace
}  // namespace pih
