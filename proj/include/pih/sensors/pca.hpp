#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pih/sensors/tactile.hpp"

namespace pih::sensors {

class PcaRankError : public std::runtime_error {
 public:
  PcaRankError(int achieved, int requested);
  int achieved_rank() const { return achieved_; }

 private:
  int achieved_;
};

/// Linear compression of raw marker flow to a k-dimensional feature.
struct PcaModel {
  Eigen::VectorXd mean;          // R
  Eigen::MatrixXd components;    // k x R, orthonormal rows
  Eigen::VectorXd explained_variance;  // k, non-increasing
  long n_samples = 0;

  int raw_dim() const { return static_cast<int>(mean.size()); }
  int k() const { return static_cast<int>(components.rows()); }

  /// components * (flow - mean); throws std::invalid_argument on a dimension mismatch.
  Eigen::VectorXd project(const Eigen::VectorXd& flow) const;
  Eigen::VectorXd project(const std::vector<double>& flow) const;
  /// mean + components^T * feature.
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& feature) const;

  /// Text format: "R k n_samples" header, mean line, k component lines,
  /// variance line; numbers in shortest round-trip form.
  void write(std::ostream& out) const;
  static PcaModel read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static PcaModel load(const std::filesystem::path& path);

  bool operator==(const PcaModel& other) const;
};

/// Top-k principal directions of the centred samples via SVD. Each
/// component is sign-normalised so its largest-magnitude entry is positive.
PcaModel fit_pca(const std::vector<std::vector<double>>& samples, int k = 15);
PcaModel fit_pca(const Eigen::MatrixXd& samples, int k = 15);

/// PCA fitted on the default 2100-frame calibration set for `cfg`. A
/// noise-free sensor is calibrated with the nominal marker noise. Cached per
/// configuration within the process.
const PcaModel& default_tactile_pca(const TactileConfig& cfg, std::uint64_t seed = 0);

}  // namespace pih::sensors
