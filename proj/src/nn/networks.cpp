#include "pih/nn/networks.hpp"

#include <stdexcept>

namespace pih::nn {

namespace {

template <typename T>
void append(std::vector<T>& dst, const std::vector<T>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

void check_batch(const ObsBatch& obs, const EncoderSpec& spec) {
  if (obs.vec.cols() != spec.vec_dim) {
    throw std::invalid_argument("observation vector has " + std::to_string(obs.vec.cols()) +
                                " entries, network expects " + std::to_string(spec.vec_dim));
  }
  if (spec.has_image() && (obs.image.cols() != spec.image_dim() || obs.image.rows() != obs.vec.rows())) {
    throw std::invalid_argument("observation image has " + std::to_string(obs.image.cols()) +
                                " values, network expects " + std::to_string(spec.image_dim()));
  }
}

}  // namespace

Encoder::Encoder(const EncoderSpec& spec, std::mt19937_64& rng) : spec_(spec) {
  if (spec.vec_dim <= 0) throw std::invalid_argument("encoder needs a vector input");
  if (spec.has_image()) {
    auto c1 = std::make_unique<Conv2d>(spec.image_h, spec.image_w, 3, spec.conv1, 3, 2, rng);
    const int h1 = c1->out_height();
    const int w1 = c1->out_width();
    image_.add(std::move(c1)).emplace<ReLU>(h1 * w1 * spec.conv1);
    auto c2 = std::make_unique<Conv2d>(h1, w1, spec.conv1, spec.conv2, 3, 2, rng);
    image_features_ = c2->out_dim();
    image_.add(std::move(c2)).emplace<ReLU>(image_features_);
  }
  vec_.emplace<Dense>(spec.vec_dim, spec.vec_hidden, rng)
      .emplace<ReLU>(spec.vec_hidden)
      .emplace<Dense>(spec.vec_hidden, spec.vec_hidden, rng)
      .emplace<ReLU>(spec.vec_hidden);
  fusion_.emplace<Dense>(image_features_ + spec.vec_hidden, spec.fusion_hidden, rng)
      .emplace<ReLU>(spec.fusion_hidden)
      .emplace<Dense>(spec.fusion_hidden, spec.fusion_hidden, rng)
      .emplace<ReLU>(spec.fusion_hidden);
}

Matrix Encoder::forward(const ObsBatch& obs) {
  check_batch(obs, spec_);
  const Matrix v = vec_.forward(obs.vec);
  if (!spec_.has_image()) return fusion_.forward(v);
  const Matrix im = image_.forward(obs.image);
  Matrix joint(obs.size(), image_features_ + spec_.vec_hidden);
  joint.leftCols(image_features_) = im;
  joint.rightCols(spec_.vec_hidden) = v;
  return fusion_.forward(joint);
}

void Encoder::backward(const Matrix& grad_features) {
  const Matrix g = fusion_.backward(grad_features);
  vec_.backward(g.rightCols(spec_.vec_hidden));
  if (spec_.has_image()) image_.backward(g.leftCols(image_features_));
}

std::vector<Parameter*> Encoder::parameters() {
  std::vector<Parameter*> out = image_.parameters();
  append(out, vec_.parameters());
  append(out, fusion_.parameters());
  return out;
}

std::vector<NamedParameter> Encoder::named_parameters(const std::string& prefix) {
  std::vector<NamedParameter> out = image_.named_parameters(prefix + "image.");
  append(out, vec_.named_parameters(prefix + "vec."));
  append(out, fusion_.named_parameters(prefix + "fusion."));
  return out;
}

void Encoder::zero_grad() {
  image_.zero_grad();
  vec_.zero_grad();
  fusion_.zero_grad();
}

Actor::Actor(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng, bool zero_head)
    : encoder_(spec, rng), head_(spec.fusion_hidden, 2 * action_dim, rng), action_dim_(action_dim) {
  if (zero_head) {
    head_.weight().value.setZero();
    head_.bias().value.setZero();
  }
}

Matrix Actor::forward(const ObsBatch& obs) { return head_.forward(encoder_.forward(obs)); }

void Actor::backward(const Matrix& grad_head) { encoder_.backward(head_.backward(grad_head)); }

std::vector<Parameter*> Actor::parameters() {
  auto out = encoder_.parameters();
  append(out, head_.parameters());
  return out;
}

std::vector<NamedParameter> Actor::named_parameters(const std::string& prefix) {
  auto out = encoder_.named_parameters(prefix + "encoder.");
  out.push_back({prefix + "head.W", &head_.weight()});
  out.push_back({prefix + "head.b", &head_.bias()});
  return out;
}

void Actor::zero_grad() {
  encoder_.zero_grad();
  head_.weight().grad.setZero();
  head_.bias().grad.setZero();
}

Critic::Critic(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng, int hidden)
    : encoder_(spec, rng), action_dim_(action_dim) {
  for (Sequential* q : {&q1_, &q2_}) {
    q->emplace<Dense>(spec.fusion_hidden + action_dim, hidden, rng)
        .emplace<ReLU>(hidden)
        .emplace<Dense>(hidden, 1, rng);
  }
}

Critic::Values Critic::forward(const ObsBatch& obs, const Matrix& action) {
  if (action.cols() != action_dim_ || action.rows() != obs.size()) {
    throw std::invalid_argument("critic action batch has the wrong shape");
  }
  const Matrix f = encoder_.forward(obs);
  Matrix joint(f.rows(), f.cols() + action_dim_);
  joint.leftCols(f.cols()) = f;
  joint.rightCols(action_dim_) = action;
  return {q1_.forward(joint), q2_.forward(joint)};
}

Matrix Critic::backward(const Matrix& grad_q1, const Matrix& grad_q2, bool update_encoder) {
  const Matrix g = q1_.backward(grad_q1) + q2_.backward(grad_q2);
  const Eigen::Index f = g.cols() - action_dim_;
  if (update_encoder) encoder_.backward(g.leftCols(f));
  return g.rightCols(action_dim_);
}

std::vector<Parameter*> Critic::parameters() {
  auto out = encoder_.parameters();
  append(out, q1_.parameters());
  append(out, q2_.parameters());
  return out;
}

std::vector<NamedParameter> Critic::named_parameters(const std::string& prefix) {
  auto out = encoder_.named_parameters(prefix + "encoder.");
  append(out, q1_.named_parameters(prefix + "q1."));
  append(out, q2_.named_parameters(prefix + "q2."));
  return out;
}

void Critic::zero_grad() {
  encoder_.zero_grad();
  q1_.zero_grad();
  q2_.zero_grad();
}

DeterministicPolicy::DeterministicPolicy(const EncoderSpec& spec, int action_dim, std::mt19937_64& rng)
    : encoder_(spec, rng), head_(spec.fusion_hidden, action_dim, rng), action_dim_(action_dim) {}

Matrix DeterministicPolicy::forward(const ObsBatch& obs) { return head_.forward(encoder_.forward(obs)); }

void DeterministicPolicy::backward(const Matrix& grad_action) {
  encoder_.backward(head_.backward(grad_action));
}

std::vector<Parameter*> DeterministicPolicy::parameters() {
  auto out = encoder_.parameters();
  append(out, head_.parameters());
  return out;
}

std::vector<NamedParameter> DeterministicPolicy::named_parameters(const std::string& prefix) {
  auto out = encoder_.named_parameters(prefix + "encoder.");
  out.push_back({prefix + "head.W", &head_.weight()});
  out.push_back({prefix + "head.b", &head_.bias()});
  return out;
}

void DeterministicPolicy::zero_grad() {
  encoder_.zero_grad();
  head_.weight().grad.setZero();
  head_.bias().grad.setZero();
}

}  // namespace pih::nn
