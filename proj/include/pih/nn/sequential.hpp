#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pih/nn/layers.hpp"

namespace pih::nn {

struct NamedParameter {
  std::string name;
  Parameter* param;
};

class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  /// Throws std::invalid_argument if the layer input does not chain.
  Sequential& add(std::unique_ptr<Layer> layer);
  template <typename L, typename... Args>
  Sequential& emplace(Args&&... args) {
    return add(std::make_unique<L>(std::forward<Args>(args)...));
  }

  Matrix forward(const Matrix& x);
  Matrix backward(const Matrix& grad_out);

  int in_dim() const;
  int out_dim() const;
  bool empty() const { return layers_.empty(); }
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

  std::vector<Parameter*> parameters();
  /// Parameters keyed "<prefix><layer index>.<W|b>".
  std::vector<NamedParameter> named_parameters(const std::string& prefix);
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Total scalar count of a parameter list.
std::size_t parameter_count(const std::vector<Parameter*>& params);
/// target <- tau * source + (1 - tau) * target, element-wise.
void polyak_update(const std::vector<Parameter*>& target, const std::vector<Parameter*>& source,
                   double tau);
void copy_parameters(const std::vector<Parameter*>& target, const std::vector<Parameter*>& source);

}  // namespace pih::nn
