#include "pih/sensors/pca.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "pih/core/base64.hpp"

namespace pih::sensors {

PcaRankError::PcaRankError(int achieved, int requested)
    : std::runtime_error("centred calibration samples have rank " + std::to_string(achieved) +
                         ", need at least " + std::to_string(requested)),
      achieved_(achieved) {}

Eigen::VectorXd PcaModel::project(const Eigen::VectorXd& flow) const {
  if (flow.size() != mean.size()) {
    throw std::invalid_argument("flow has dimension " + std::to_string(flow.size()) +
                                ", PCA expects " + std::to_string(mean.size()));
  }
  return components * (flow - mean);
}

Eigen::VectorXd PcaModel::project(const std::vector<double>& flow) const {
  return project(Eigen::Map<const Eigen::VectorXd>(flow.data(), static_cast<Eigen::Index>(flow.size())));
}

Eigen::VectorXd PcaModel::reconstruct(const Eigen::VectorXd& feature) const {
  return mean + components.transpose() * feature;
}

bool PcaModel::operator==(const PcaModel& o) const {
  return n_samples == o.n_samples && mean.size() == o.mean.size() && mean == o.mean &&
         components.rows() == o.components.rows() && components.cols() == o.components.cols() &&
         components == o.components && explained_variance == o.explained_variance;
}

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i) out << ' ';
    out << format_double(row[i]);
  }
  out << '\n';
}

Eigen::RowVectorXd read_row(std::istream& in, Eigen::Index n, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("PCA file: missing ") + what);
  std::istringstream ls(line);
  Eigen::RowVectorXd row(n);
  std::string tok;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(ls >> tok)) throw std::runtime_error(std::string("PCA file: short ") + what + " line");
    const auto v = parse_double(tok);
    if (!v) throw std::runtime_error("PCA file: bad number '" + tok + "'");
    row[i] = *v;
  }
  if (ls >> tok) throw std::runtime_error(std::string("PCA file: long ") + what + " line");
  return row;
}

}  // namespace

void PcaModel::write(std::ostream& out) const {
  out << raw_dim() << ' ' << k() << ' ' << n_samples << '\n';
  write_row(out, mean.transpose());
  for (Eigen::Index r = 0; r < components.rows(); ++r) write_row(out, components.row(r));
  write_row(out, explained_variance.transpose());
}

PcaModel PcaModel::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("PCA file: missing header");
  std::istringstream hs(line);
  long r = 0;
  long k = 0;
  PcaModel m;
  if (!(hs >> r >> k >> m.n_samples) || r <= 0 || k <= 0) {
    throw std::runtime_error("PCA file: bad header '" + line + "'");
  }
  m.mean = read_row(in, r, "mean").transpose();
  m.components.resize(k, r);
  for (long i = 0; i < k; ++i) m.components.row(i) = read_row(in, r, "component");
  m.explained_variance = read_row(in, k, "variance").transpose();
  return m;
}

void PcaModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

PcaModel PcaModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read(in);
}

PcaModel fit_pca(const Eigen::MatrixXd& samples, int k) {
  const Eigen::Index n = samples.rows();
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (n <= k) {
    throw std::invalid_argument("need more than k=" + std::to_string(k) + " samples, got " +
                                std::to_string(n));
  }
  PcaModel model;
  model.n_samples = n;
  model.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centred = samples.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(centred.rows(), centred.cols())) *
                     std::numeric_limits<double>::epsilon() * (sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol) ++rank;
  }
  if (rank < k) throw PcaRankError(rank, k);

  model.components = svd.matrixV().leftCols(k).transpose();
  for (int r = 0; r < k; ++r) {
    Eigen::Index arg = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
  }
  model.explained_variance = sv.head(k).array().square() / static_cast<double>(n - 1);
  return model;
}

PcaModel fit_pca(const std::vector<std::vector<double>>& samples, int k) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const auto dim = static_cast<Eigen::Index>(samples.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (static_cast<Eigen::Index>(samples[i].size()) != dim) {
      throw std::invalid_argument("sample " + std::to_string(i) + " has dimension " +
                                  std::to_string(samples[i].size()) + ", expected " +
                                  std::to_string(dim));
    }
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(samples[i].data(), dim);
  }
  return fit_pca(m, k);
}

const PcaModel& default_tactile_pca(const TactileConfig& sensor, std::uint64_t seed) {
  // Without marker noise the calibration flows span only the eight load
  // components of the two pads; calibrate with the nominal noise floor.
  TactileConfig cfg = sensor;
  if (!(cfg.noise_sigma > 0.0)) cfg.noise_sigma = TactileConfig{}.noise_sigma;
  using Key = std::tuple<int, int, double, double, double, double, double, double, double, double,
                         std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, PcaModel> cache;
  const Key key{cfg.grid_rows,     cfg.grid_cols,   cfg.marker_spacing,    cfg.dilate_gain,
                cfg.shear_gain,    cfg.twist_gain,  cfg.noise_sigma,       cfg.displacement_cap,
                cfg.finger_half_width, cfg.grip_lever, seed};
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    RandomStream stream(seed);
    it = cache.emplace(key, fit_pca(calibration_frames(cfg, stream), 15)).first;
  }
  return it->second;
}

}  // namespace pih::sensors
