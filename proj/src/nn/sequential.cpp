#include "pih/nn/sequential.hpp"

#include <stdexcept>

namespace pih::nn {

Sequential::Sequential(const Sequential& other) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    layers_.clear();
    for (const auto& l : other.layers_) layers_.push_back(l->clone());
  }
  return *this;
}

Sequential& Sequential::add(std::unique_ptr<Layer> layer) {
  if (!layers_.empty() && layers_.back()->out_dim() != layer->in_dim()) {
    throw std::invalid_argument("layer " + std::to_string(layers_.size()) + " (" + layer->kind() +
                                ") expects " + std::to_string(layer->in_dim()) + " inputs, previous layer emits " +
                                std::to_string(layers_.back()->out_dim()));
  }
  layers_.push_back(std::move(layer));
  return *this;
}

Matrix Sequential::forward(const Matrix& x) {
  Matrix h = x;
  for (auto& l : layers_) h = l->forward(h);
  return h;
}

Matrix Sequential::backward(const Matrix& grad_out) {
  Matrix g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

int Sequential::in_dim() const { return layers_.empty() ? 0 : layers_.front()->in_dim(); }
int Sequential::out_dim() const { return layers_.empty() ? 0 : layers_.back()->out_dim(); }

std::vector<Parameter*> Sequential::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (Parameter* p : l->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<NamedParameter> Sequential::named_parameters(const std::string& prefix) {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (Parameter* p : layers_[i]->parameters()) {
      out.push_back({prefix + std::to_string(i) + "." + p->name, p});
    }
  }
  return out;
}

void Sequential::zero_grad() {
  for (Parameter* p : parameters()) p->grad.setZero();
}

std::size_t parameter_count(const std::vector<Parameter*>& params) {
  std::size_t n = 0;
  for (const Parameter* p : params) n += static_cast<std::size_t>(p->value.size());
  return n;
}

namespace {
void check_same(const std::vector<Parameter*>& a, const std::vector<Parameter*>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("parameter lists differ in length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->value.rows() != b[i]->value.rows() || a[i]->value.cols() != b[i]->value.cols()) {
      throw std::invalid_argument("parameter " + std::to_string(i) + " shapes differ");
    }
  }
}
}  // namespace

void polyak_update(const std::vector<Parameter*>& target, const std::vector<Parameter*>& source,
                   double tau) {
  check_same(target, source);
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (tau == 1.0) {
      target[i]->value = source[i]->value;
    } else {
      target[i]->value = tau * source[i]->value + (1.0 - tau) * target[i]->value;
    }
  }
}

void copy_parameters(const std::vector<Parameter*>& target, const std::vector<Parameter*>& source) {
  polyak_update(target, source, 1.0);
}

}  // namespace pih::nn
