#include "pih/harness/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "pih/core/base64.hpp"

namespace pih {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kOurs: return "ours";
    case Method::kDirectRl: return "direct_rl";
    case Method::kSl: return "sl";
    case Method::kResidual: return "residual";
  }
  return "ours";
}

Method method_from_string(std::string_view name) {
  if (name == "ours") return Method::kOurs;
  if (name == "direct_rl" || name == "direct") return Method::kDirectRl;
  if (name == "sl") return Method::kSl;
  if (name == "residual") return Method::kResidual;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Entry {
  Setter set;
  Getter get;
};

double to_double(const std::string& v) {
  const auto d = parse_double(v);
  if (!d) throw std::invalid_argument("expected a number, got '" + v + "'");
  return *d;
}

long long to_int(const std::string& v) {
  const auto i = parse_int(v);
  if (!i) throw std::invalid_argument("expected an integer, got '" + v + "'");
  return *i;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty list item");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

using Reg = std::map<std::string, Entry>;

template <typename F>
void real(Reg& r, const std::string& key, F field) {
  r[key] = {[field](ExperimentConfig& c, const std::string& v) { field(c) = to_double(v); },
            [field](const ExperimentConfig& c) { return format_double(field(const_cast<ExperimentConfig&>(c))); }};
}

template <typename F>
void integer(Reg& r, const std::string& key, F field) {
  r[key] = {[field](ExperimentConfig& c, const std::string& v) {
              using T = std::remove_reference_t<decltype(field(c))>;
              const long long i = to_int(v);
              if constexpr (std::is_unsigned_v<T>) {
                if (i < 0) throw std::invalid_argument("expected a non-negative integer");
              }
              field(c) = static_cast<T>(i);
            },
            [field](const ExperimentConfig& c) { return std::to_string(field(const_cast<ExperimentConfig&>(c))); }};
}

template <typename F>
void boolean(Reg& r, const std::string& key, F field) {
  r[key] = {[field](ExperimentConfig& c, const std::string& v) { field(c) = to_bool(v); },
            [field](const ExperimentConfig& c) { return std::string(field(const_cast<ExperimentConfig&>(c)) ? "true" : "false"); }};
}

void train_keys(Reg& r, const std::string& p, rl::TrainConfig ExperimentConfig::*t) {
  auto tc = [t](auto f) { return [t, f](ExperimentConfig& c) -> auto& { return f(c.*t); }; };
  integer(r, p + "steps", tc([](rl::TrainConfig& x) -> auto& { return x.total_steps; }));
  integer(r, p + "warmup_steps", tc([](rl::TrainConfig& x) -> auto& { return x.warmup_steps; }));
  integer(r, p + "update_after", tc([](rl::TrainConfig& x) -> auto& { return x.update_after; }));
  integer(r, p + "updates_per_step", tc([](rl::TrainConfig& x) -> auto& { return x.updates_per_step; }));
  integer(r, p + "replay_capacity", tc([](rl::TrainConfig& x) -> auto& { return x.replay_capacity; }));
  real(r, p + "gamma", tc([](rl::TrainConfig& x) -> auto& { return x.sac.gamma; }));
  real(r, p + "tau", tc([](rl::TrainConfig& x) -> auto& { return x.sac.tau; }));
  integer(r, p + "batch_size", tc([](rl::TrainConfig& x) -> auto& { return x.sac.batch_size; }));
  real(r, p + "lr", tc([](rl::TrainConfig& x) -> auto& { return x.sac.lr; }));
  real(r, p + "init_alpha", tc([](rl::TrainConfig& x) -> auto& { return x.sac.init_alpha; }));
  boolean(r, p + "auto_alpha", tc([](rl::TrainConfig& x) -> auto& { return x.sac.auto_alpha; }));
  real(r, p + "reward_scale", tc([](rl::TrainConfig& x) -> auto& { return x.sac.reward_scale; }));
  integer(r, p + "critic_hidden", tc([](rl::TrainConfig& x) -> auto& { return x.sac.critic_hidden; }));
  real(r, p + "rho_start", tc([](rl::TrainConfig& x) -> auto& { return x.rho_start; }));
  real(r, p + "rho_end", tc([](rl::TrainConfig& x) -> auto& { return x.rho_end; }));
  real(r, p + "lambda_start", tc([](rl::TrainConfig& x) -> auto& { return x.lambda_start; }));
  real(r, p + "lambda_end", tc([](rl::TrainConfig& x) -> auto& { return x.lambda_end; }));
  integer(r, p + "bc_updates", tc([](rl::TrainConfig& x) -> auto& { return x.bc_updates; }));
  integer(r, p + "bc_batch", tc([](rl::TrainConfig& x) -> auto& { return x.bc_batch; }));
  integer(r, p + "conv1", tc([](rl::TrainConfig& x) -> auto& { return x.conv1; }));
  integer(r, p + "conv2", tc([](rl::TrainConfig& x) -> auto& { return x.conv2; }));
  integer(r, p + "vec_hidden", tc([](rl::TrainConfig& x) -> auto& { return x.vec_hidden; }));
  integer(r, p + "fusion_hidden", tc([](rl::TrainConfig& x) -> auto& { return x.fusion_hidden; }));
  // target entropy: "auto" selects -dim(A)
  r[p + "target_entropy"] = {
      [t](ExperimentConfig& c, const std::string& v) {
        if (v == "auto") {
          (c.*t).sac.target_entropy_set = false;
          (c.*t).sac.target_entropy = 0.0;
        } else {
          (c.*t).sac.target_entropy_set = true;
          (c.*t).sac.target_entropy = to_double(v);
        }
      },
      [t](const ExperimentConfig& c) {
        return (c.*t).sac.target_entropy_set ? format_double((c.*t).sac.target_entropy) : std::string("auto");
      }};
}

#define FIELD(expr) [](ExperimentConfig& c) -> auto& { return expr; }

const Reg& registry() {
  static const Reg reg = [] {
    Reg r;
    r["env.task"] = {[](ExperimentConfig& c, const std::string& v) { c.env.task = task_from_string(v); },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.env.task)); }};
    integer(r, "env.episode_len", FIELD(c.env.episode_len));
    real(r, "env.contact_stiffness", FIELD(c.env.contact_stiffness));
    real(r, "env.friction", FIELD(c.env.friction));
    real(r, "env.tilt_max", FIELD(c.env.tilt_max));
    real(r, "env.chamfer", FIELD(c.env.chamfer));
    real(r, "env.hole_x", FIELD(c.env.hole_nominal[0]));
    real(r, "env.hole_y", FIELD(c.env.hole_nominal[1]));
    real(r, "env.hole_z", FIELD(c.env.hole_nominal[2]));
    real(r, "env.hole_jitter", FIELD(c.env.hole_jitter));
    real(r, "env.hole_depth", FIELD(c.env.hole_depth));
    real(r, "env.insert_depth", FIELD(c.env.insert_depth));
    real(r, "env.hover_height", FIELD(c.env.hover_height));
    real(r, "env.goal_dx_min", FIELD(c.env.goal_dx[0]));
    real(r, "env.goal_dx_max", FIELD(c.env.goal_dx[1]));
    real(r, "env.goal_dy_min", FIELD(c.env.goal_dy[0]));
    real(r, "env.goal_dy_max", FIELD(c.env.goal_dy[1]));
    real(r, "env.goal_dz_min", FIELD(c.env.goal_dz[0]));
    real(r, "env.goal_dz_max", FIELD(c.env.goal_dz[1]));
    real(r, "env.posture_weight_min", FIELD(c.env.posture_weight[0]));
    real(r, "env.posture_weight_max", FIELD(c.env.posture_weight[1]));
    real(r, "env.rotation_weight", FIELD(c.env.rotation_weight));
    real(r, "env.pooh_success_radius", FIELD(c.env.pooh_success_radius));
    real(r, "env.pih_success_depth", FIELD(c.env.pih_success_depth));
    integer(r, "env.max_reset_retries", FIELD(c.env.max_reset_retries));
    real(r, "env.clearance", FIELD(c.env.clearance));
    real(r, "env.workspace_xy", FIELD(c.env.workspace_xy));
    real(r, "env.workspace_z", FIELD(c.env.workspace_z));
    real(r, "env.workspace_angle", FIELD(c.env.workspace_angle));

    integer(r, "render.height", FIELD(c.env.render.height));
    integer(r, "render.width", FIELD(c.env.render.width));
    real(r, "render.view_x", FIELD(c.env.render.view_x));
    real(r, "render.view_y", FIELD(c.env.render.view_y));
    real(r, "render.view_z", FIELD(c.env.render.view_z));
    real(r, "render.half_extent", FIELD(c.env.render.half_extent));
    real(r, "render.oblique", FIELD(c.env.render.oblique));
    integer(r, "render.supersample", FIELD(c.env.render.supersample));
    real(r, "render.color_scale_min", FIELD(c.env.render.color_scale_min));
    real(r, "render.color_scale_max", FIELD(c.env.render.color_scale_max));
    real(r, "render.peg_length", FIELD(c.env.render.peg_length));
    integer(r, "render.peg_slices", FIELD(c.env.render.peg_slices));
    real(r, "render.goal_marker_radius", FIELD(c.env.render.goal_marker_radius));

    integer(r, "tactile.grid_rows", FIELD(c.env.tactile.grid_rows));
    integer(r, "tactile.grid_cols", FIELD(c.env.tactile.grid_cols));
    real(r, "tactile.marker_spacing", FIELD(c.env.tactile.marker_spacing));
    real(r, "tactile.dilate_gain", FIELD(c.env.tactile.dilate_gain));
    real(r, "tactile.shear_gain", FIELD(c.env.tactile.shear_gain));
    real(r, "tactile.twist_gain", FIELD(c.env.tactile.twist_gain));
    real(r, "tactile.noise_sigma", FIELD(c.env.tactile.noise_sigma));
    real(r, "tactile.displacement_cap", FIELD(c.env.tactile.displacement_cap));
    real(r, "tactile.finger_half_width", FIELD(c.env.tactile.finger_half_width));
    real(r, "tactile.grip_lever", FIELD(c.env.tactile.grip_lever));
    integer(r, "tactile.pca_seed", FIELD(c.env.pca_seed));

    real(r, "reversal.z_threshold", FIELD(c.reversal.z_threshold));
    real(r, "reversal.offset_range", FIELD(c.reversal.offset_range));
    real(r, "reversal.randomized_fraction", FIELD(c.reversal.randomized_fraction));
    integer(r, "reversal.max_retries", FIELD(c.reversal.max_retries));
    real(r, "reversal.divergence_tolerance", FIELD(c.reversal.divergence_tolerance));

    train_keys(r, "pooh.", &ExperimentConfig::pooh);
    train_keys(r, "pih.", &ExperimentConfig::pih);

    integer(r, "sl.epochs", FIELD(c.sl.epochs));
    integer(r, "sl.batch_size", FIELD(c.sl.batch_size));
    real(r, "sl.lr", FIELD(c.sl.lr));
    boolean(r, "sl.shuffle", FIELD(c.sl.shuffle));

    r["experiment.method"] = {[](ExperimentConfig& c, const std::string& v) { c.method = method_from_string(v); },
                              [](const ExperimentConfig& c) { return std::string(to_string(c.method)); }};
    boolean(r, "experiment.no_vision", FIELD(c.ablation.no_vision));
    boolean(r, "experiment.no_tactile", FIELD(c.ablation.no_tactile));
    boolean(r, "experiment.no_randomization", FIELD(c.ablation.no_randomization));
    boolean(r, "experiment.no_hybrid", FIELD(c.ablation.no_hybrid));
    boolean(r, "experiment.no_bc", FIELD(c.ablation.no_bc));
    r["experiment.objects"] = {[](ExperimentConfig& c, const std::string& v) { c.objects = split_list(v); },
                               [](const ExperimentConfig& c) { return join(c.objects); }};
    r["experiment.seeds"] = {[](ExperimentConfig& c, const std::string& v) {
                               c.seeds.clear();
                               for (const auto& s : split_list(v)) {
                                 const long long i = to_int(s);
                                 if (i < 0) throw std::invalid_argument("seeds must be non-negative");
                                 c.seeds.push_back(static_cast<std::uint64_t>(i));
                               }
                             },
                             [](const ExperimentConfig& c) { return join(c.seeds); }};
    integer(r, "experiment.trials_per_object", FIELD(c.trials_per_object));
    integer(r, "experiment.force_successes", FIELD(c.force_successes));
    integer(r, "experiment.expert_per_object", FIELD(c.expert_per_object));
    integer(r, "experiment.collect_attempts_per_object", FIELD(c.collect_attempts_per_object));
    r["experiment.catalog"] = {[](ExperimentConfig& c, const std::string& v) { c.catalog = v; },
                               [](const ExperimentConfig& c) { return c.catalog; }};
    return r;
  }();
  return reg;
}

#undef FIELD

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const auto& reg = registry();
  const auto it = reg.find(key);
  if (it == reg.end()) throw ConfigError(0, "unknown key '" + key + "'");
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(0, key + ": " + e.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : registry()) out.push_back(k);
  return out;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(line_no, e.what());
    }
  }
  try {
    base.validate();
  } catch (const ConfigError& e) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const auto& [k, e] : registry()) out << k << " = " << e.get(cfg) << '\n';
}

void ExperimentConfig::validate() const {
  try {
    env.validate();
    reversal.validate();
    pooh.validate();
    pih.validate();
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  if (ablation.any() && method != Method::kOurs) throw ConfigError(0, "ablation flags require method = ours");
  if (objects.empty()) throw ConfigError(0, "experiment.objects must not be empty");
  if (seeds.empty()) throw ConfigError(0, "experiment.seeds must not be empty");
  if (trials_per_object < 1) throw ConfigError(0, "trials_per_object must be >= 1");
  if (force_successes < 1) throw ConfigError(0, "force_successes must be >= 1");
  if (expert_per_object < 1 || collect_attempts_per_object < expert_per_object) {
    throw ConfigError(0, "need 1 <= expert_per_object <= collect_attempts_per_object");
  }
  if (sl.epochs < 0 || sl.batch_size < 0 || !(sl.lr > 0.0)) throw ConfigError(0, "invalid sl settings");
}

std::string ExperimentConfig::digest() const {
  std::ostringstream s;
  write_config(s, *this);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
  return buf;
}

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.env.render.height = 16;
  c.env.render.width = 16;
  // Angle errors dominate the reward at unit weight and stall the
  // translation terms at this budget.
  c.env.rotation_weight = 0.01;
  for (rl::TrainConfig* t : {&c.pooh, &c.pih}) {
    t->warmup_steps = 500;
    t->update_after = 500;
    t->sac.lr = 1e-3;
    t->sac.reward_scale = 100.0;
  }
  c.pooh.total_steps = 10000;
  c.pih.total_steps = 10000;
  c.pih.hybrid = true;
  c.pih.bc = true;
  c.expert_per_object = 50;
  c.collect_attempts_per_object = 400;
  c.sl.epochs = 100;
  c.sl.batch_size = 256;
  return c;
}

}  // namespace pih
