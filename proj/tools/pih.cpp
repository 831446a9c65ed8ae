// Command-line entry point for the PooH -> PiH pipeline.

#include <Eigen/Core>
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "pih/core/base64.hpp"
#include "pih/core/dataset.hpp"
#include "pih/harness/ablation.hpp"
#include "pih/harness/config.hpp"
#include "pih/harness/pipeline.hpp"
#include "pih/nn/gradcheck.hpp"
#include "pih/sensors/pca.hpp"

namespace fs = std::filesystem;
using namespace pih;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool deterministic = false;
  bool desk = false;
  std::vector<std::string> overrides;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig base = g.desk ? desk_config() : ExperimentConfig{};
  ExperimentConfig cfg = g.config.empty() ? base : load_config(g.config, base);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(0, "--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::uint64_t run_seed(const Globals& g, const ExperimentConfig& cfg) {
  return g.seed ? *g.seed : cfg.seeds.front();
}

fs::path out_dir(const Globals& g, const char* fallback) {
  const fs::path p = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
  fs::create_directories(p);
  return p;
}

void save_config(const fs::path& dir, const ExperimentConfig& cfg) {
  std::ofstream out(dir / "config.txt");
  write_config(out, cfg);
}

void print_eval(const EvalReport& r) { r.write_text(std::cout); }

void save_training(const fs::path& dir, TrainOutput& out, const ExperimentConfig& cfg) {
  out.policy.save(dir / "policy");
  if (!out.log.empty()) out.log.save_csv(dir / "train_log.csv");
  save_config(dir, cfg);
  if (!out.log.empty()) {
    std::cout << "reward " << format_double(out.log.initial_reward()) << " -> "
              << format_double(out.log.final_reward()) << ", episodes " << out.log.episode_successes().size()
              << '\n';
  }
  std::cout << "policy written to " << (dir / "policy").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peg-out-of-hole to peg-in-hole learning pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Flat key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Run seed (default: first configured seed)");
  app.add_option("--out", g.out, "Output directory or file");
  app.add_flag("--deterministic", g.deterministic, "Pin numerics to one thread");
  app.add_flag("--desk", g.desk, "Start from the small desk settings instead of the defaults");
  app.add_option("--set", g.overrides, "Override one configuration key (key=value), repeatable");

  auto* train_pooh_cmd = app.add_subcommand("train-pooh", "Train the extraction policy with SAC");

  auto* collect_cmd = app.add_subcommand("collect", "Roll out a PooH policy into a demonstration dataset");
  std::string collect_policy;
  bool collect_scripted = false;
  collect_cmd->add_option("--policy", collect_policy, "Directory written by train-pooh");
  collect_cmd->add_flag("--scripted", collect_scripted, "Use the oracle extraction controller instead");

  auto* reverse_cmd = app.add_subcommand("reverse", "Turn PooH demonstrations into PiH expert data");
  std::string reverse_in;
  reverse_cmd->add_option("--in", reverse_in, "PooH dataset")->required()->check(CLI::ExistingFile);

  auto* train_pih_cmd = app.add_subcommand("train-pih", "Train the insertion policy (method from the config)");
  std::string pih_dataset;
  train_pih_cmd->add_option("--dataset", pih_dataset, "Expert dataset written by reverse");

  auto* baseline_cmd = app.add_subcommand("baseline", "Train a baseline: direct, sl or residual");
  std::string baseline_kind;
  std::string baseline_dataset;
  baseline_cmd->add_option("kind", baseline_kind, "direct | sl | residual")
      ->required()
      ->check(CLI::IsMember({"direct", "sl", "residual"}));
  baseline_cmd->add_option("--dataset", baseline_dataset, "Expert dataset (sl, residual)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained PiH policy");
  std::string eval_policy;
  eval_cmd->add_option("--policy", eval_policy, "Policy directory")->required();

  auto* ablate_cmd = app.add_subcommand("ablate", "Run the resumable comparison and ablation matrix");
  std::vector<std::string> ablate_cells;
  ablate_cmd->add_option("--cells", ablate_cells, "Cells to run (default: all)")->delimiter(',');

  auto* pca_cmd = app.add_subcommand("calibrate-tactile", "Fit and save the tactile PCA model");
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every layer type");
  auto* keys_cmd = app.add_subcommand("config-keys", "Print every configuration key with its value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g.deterministic) Eigen::setNbThreads(1);
    const ExperimentConfig cfg = load(g);
    const std::uint64_t seed = run_seed(g, cfg);

    if (*keys_cmd) {
      write_config(std::cout, cfg);
    } else if (*train_pooh_cmd) {
      const fs::path dir = out_dir(g, "pooh");
      auto out = train_pooh(cfg, seed);
      save_training(dir, out, cfg);
    } else if (*collect_cmd) {
      if (collect_policy.empty() && !collect_scripted) throw CLI::ValidationError("collect", "give --policy or --scripted");
      const fs::path file = g.out.empty() ? fs::path("pooh.pihd") : fs::path(g.out);
      CollectStats stats;
      std::vector<Trajectory> data;
      if (collect_scripted) {
        rl::PegHoleAdapter env(task_env(cfg, Task::kPooH), experiment_pairs(cfg));
        ScriptedExtractionPolicy policy(env);
        data = collect(policy, env, cfg, seed, &stats);
      } else {
        TrainedPolicy policy = TrainedPolicy::load(collect_policy);
        data = collect(policy.policy(), cfg, seed, &stats);
      }
      if (file.has_parent_path()) fs::create_directories(file.parent_path());
      write_dataset(file, data);
      for (std::size_t i = 0; i < stats.objects.size(); ++i) {
        std::cout << stats.objects[i] << ": " << stats.successes[i] << " successful of " << stats.attempts[i]
                  << " attempts\n";
      }
      std::cout << data.size() << " trajectories written to " << file.string() << '\n';
    } else if (*reverse_cmd) {
      const fs::path file = g.out.empty() ? fs::path("expert.pihd") : fs::path(g.out);
      ReversalSummary summary;
      const auto data = reverse(read_dataset(reverse_in), cfg, seed, &summary);
      if (file.has_parent_path()) fs::create_directories(file.parent_path());
      write_dataset(file, data);
      std::cout << summary.line() << '\n';
    } else if (*train_pih_cmd || *baseline_cmd) {
      ExperimentConfig c = cfg;
      std::string dataset = pih_dataset;
      if (*baseline_cmd) {
        c.method = baseline_kind == "direct" ? Method::kDirectRl : method_from_string(baseline_kind);
        c.ablation = {};
        dataset = baseline_dataset;
      }
      c.validate();
      std::vector<Trajectory> expert;
      if (!dataset.empty()) expert = read_dataset(dataset);
      const fs::path dir = out_dir(g, "pih");
      auto out = train_pih(c, seed, expert);
      save_training(dir, out, c);
    } else if (*eval_cmd) {
      TrainedPolicy policy = TrainedPolicy::load(eval_policy);
      const EvalReport report = evaluate_policy(policy, cfg, seed);
      print_eval(report);
      if (!g.out.empty()) report.save(out_dir(g, "eval"));
    } else if (*ablate_cmd) {
      MatrixConfig mc;
      mc.base = cfg;
      if (g.seed) mc.base.seeds = {*g.seed};
      mc.cells = ablate_cells;
      mc.out = out_dir(g, "ablation");
      mc.progress = &std::cerr;
      const MatrixResult result = run_ablation_matrix(mc);
      result.write_text(std::cout);
      return result.failed_runs == 0 ? 0 : 1;
    } else if (*pca_cmd) {
      const auto& pca = sensors::default_tactile_pca(cfg.env.tactile, cfg.env.pca_seed);
      const fs::path file = g.out.empty() ? fs::path("tactile_pca.txt") : fs::path(g.out);
      if (file.has_parent_path()) fs::create_directories(file.parent_path());
      pca.save(file);
      const double total = pca.explained_variance.sum();
      std::cout << "raw dim " << pca.raw_dim() << ", components " << pca.k() << ", samples " << pca.n_samples << '\n';
      for (int i = 0; i < pca.k(); ++i) {
        std::cout << "  pc" << i << " variance " << format_double(pca.explained_variance(i)) << " ("
                  << format_double(100.0 * pca.explained_variance(i) / total) << "% of retained)\n";
      }
      std::cout << "model written to " << file.string() << '\n';
    } else if (*grad_cmd) {
      bool ok = true;
      for (const auto& r : nn::gradcheck_all(seed)) {
        const bool pass = r.max_rel_error < 1e-4;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << r.name << " max_rel_error=" << r.max_rel_error
                  << " checked=" << r.checked << " worst=" << r.worst << '\n';
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
