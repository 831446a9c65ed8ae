#pragma once

#include <random>
#include <string>
#include <vector>

#include "pih/nn/sequential.hpp"

namespace pih::nn {

/// Network input batch: flattened H x W x 3 images and the vector part k ++ c.
struct ObsBatch {
  Matrix image;  // B x (H*W*3), or B x 0 without an image branch
  Matrix vec;    // B x vec_dim

  Eigen::Index size() const { return vec.rows(); }
};

struct EncoderSpec {
  int image_h = 32;  // 0 disables the image branch
  int image_w = 32;
  int vec_dim = 21;
  int conv1 = 8;
  int conv2 = 16;
  int vec_hidden = 64;
  int fusion_hidden = 128;

  bool has_image() const { return image_h > 0 && image_w > 0; }
  int image_dim() const { return has_image() ? image_h * image_w * 3 : 0; }
  bool operator==(const EncoderSpec&) const = default;
};

/// Image branch: two stride-2 3x3 convolutions with ReLU. Vector branch: a
/// two-layer ReLU MLP. The flattened image features and vector features are
/// concatenated and fused by a two-layer ReLU MLP.
class Encoder {
 public:
  Encoder(const EncoderSpec& spec, std::mt19937_64& rng);

  Matrix forward(const ObsBatch& obs);
  void backward(const Matrix& grad_features);

  int out_dim() const { return spec_.fusion_hidden; }
  const EncoderSpec& spec() const { return spec_; }
  std::vector<Parameter*> parameters();
  std::vector<NamedParameter> named_parameters(const std::string& prefix);
  void zero_grad();

 private:
  EncoderSpec spec_;
  Sequential image_;
  Sequential vec_;
  Sequential fusion_;
  int image_features_ = 0;
};

/// Encoder followed by a linear head with 2 * action_dim outputs
/// (mean, log-std) for the squashed Gaussian policy.
class Actor {
 public:
  Actor(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng, bool zero_head = false);

  Matrix forward(const ObsBatch& obs);
  void backward(const Matrix& grad_head);

  int action_dim() const { return action_dim_; }
  const EncoderSpec& spec() const { return encoder_.spec(); }
  std::vector<Parameter*> parameters();
  std::vector<NamedParameter> named_parameters(const std::string& prefix = "actor.");
  void zero_grad();

 private:
  Encoder encoder_;
  Dense head_;
  int action_dim_;
};

/// Twin Q functions sharing one encoder: Q_i(o, a) = head_i([enc(o), a]).
class Critic {
 public:
  Critic(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng, int hidden = 128);

  struct Values {
    Matrix q1;  // B x 1
    Matrix q2;
  };
  Values forward(const ObsBatch& obs, const Matrix& action);
  /// Returns dL/d(action). With `update_encoder` false the encoder is not
  /// back-propagated (used when only the action gradient is needed).
  Matrix backward(const Matrix& grad_q1, const Matrix& grad_q2, bool update_encoder = true);

  int action_dim() const { return action_dim_; }
  std::vector<Parameter*> parameters();
  std::vector<NamedParameter> named_parameters(const std::string& prefix = "critic.");
  void zero_grad();

 private:
  Encoder encoder_;
  Sequential q1_;
  Sequential q2_;
  int action_dim_;
};

/// Encoder plus a linear action layer, trained by regression.
class DeterministicPolicy {
 public:
  DeterministicPolicy(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng);

  Matrix forward(const ObsBatch& obs);
  void backward(const Matrix& grad_action);

  int action_dim() const { return action_dim_; }
  const EncoderSpec& spec() const { return encoder_.spec(); }
  std::vector<Parameter*> parameters();
  std::vector<NamedParameter> named_parameters(const std::string& prefix = "sl.");
  void zero_grad();

 private:
  Encoder encoder_;
  Dense head_;
  int action_dim_;
};

}  // namespace pih::nn
