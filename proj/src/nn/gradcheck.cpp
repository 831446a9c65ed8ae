#include "pih/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pih/nn/networks.hpp"
#include "pih/nn/policy_head.hpp"

namespace pih::nn {

GradCheckResult gradcheck(const std::vector<NamedParameter>& params,
                          const std::function<double()>& loss,
                          const std::function<void()>& backward, double h) {
  for (const auto& np : params) np.param->grad.setZero();
  loss();
  backward();
  std::vector<Matrix> analytic;
  for (const auto& np : params) analytic.push_back(np.param->grad);

  GradCheckResult r;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& value = params[k].param->value;
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double saved = value.data()[i];
      value.data()[i] = saved + h;
      const double up = loss();
      value.data()[i] = saved - h;
      const double down = loss();
      value.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[k].data()[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      if (rel >= r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst = params[k].name + "[" + std::to_string(i) + "]";
      }
      ++r.checked;
    }
  }
  return r;
}

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Inputs bounded away from the ReLU kink so central differences stay on one side.
Matrix away_from_zero(Matrix m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double& v = m.data()[i];
    if (std::abs(v) < 0.05) v = v < 0.0 ? -0.05 - std::abs(v) : 0.05 + v;
  }
  return m;
}

// Wraps an input matrix as a parameter so its gradient is checked too.
struct InputParam {
  Parameter p;
  explicit InputParam(Matrix x) : p{"x", std::move(x), Matrix()} { p.grad = Matrix::Zero(p.value.rows(), p.value.cols()); }
};

GradCheckResult check_layer(const std::string& name, Layer& layer, Matrix x, std::mt19937_64& rng) {
  InputParam in(std::move(x));
  const Matrix weights = random_matrix(in.p.value.rows(), layer.out_dim(), rng);
  std::vector<NamedParameter> params{{"input", &in.p}};
  for (Parameter* p : layer.parameters()) params.push_back({p->name, p});
  auto loss = [&] { return layer.forward(in.p.value).cwiseProduct(weights).sum(); };
  auto back = [&] {
    for (Parameter* p : layer.parameters()) p->grad.setZero();
    layer.forward(in.p.value);
    in.p.grad = layer.backward(weights);
  };
  auto r = gradcheck(params, loss, back);
  r.name = name;
  return r;
}

}  // namespace

std::vector<GradCheckResult> gradcheck_all(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GradCheckResult> out;
  const int batch = 3;

  {
    Dense d(5, 4, rng);
    out.push_back(check_layer("dense", d, random_matrix(batch, 5, rng), rng));
  }
  {
    Conv2d c(7, 6, 2, 3, 3, 2, rng);
    out.push_back(check_layer("conv2d", c, random_matrix(batch, c.in_dim(), rng), rng));
  }
  {
    ReLU r(6);
    out.push_back(check_layer("relu", r, away_from_zero(random_matrix(batch, 6, rng)), rng));
  }
  {
    Tanh t(6);
    out.push_back(check_layer("tanh", t, random_matrix(batch, 6, rng), rng));
  }
  {
    Sequential net;
    net.emplace<Dense>(4, 8, rng).emplace<Tanh>(8).emplace<Dense>(8, 8, rng).emplace<ReLU>(8).emplace<Dense>(8, 2, rng);
    const Matrix x = random_matrix(batch, 4, rng);
    const Matrix w = random_matrix(batch, 2, rng);
    auto r = gradcheck(
        net.named_parameters("mlp."), [&] { return net.forward(x).cwiseProduct(w).sum(); },
        [&] {
          net.zero_grad();
          net.forward(x);
          net.backward(w);
        });
    r.name = "mlp3";
    out.push_back(r);
  }

  EncoderSpec spec;
  spec.image_h = 16;
  spec.image_w = 16;
  spec.vec_dim = 5;
  spec.conv1 = 2;
  spec.conv2 = 3;
  spec.vec_hidden = 6;
  spec.fusion_hidden = 7;
  ObsBatch obs{random_matrix(batch, spec.image_dim(), rng), random_matrix(batch, spec.vec_dim, rng)};
  const int a_dim = 2;
  {
    Actor actor(spec, a_dim, rng);
    const Matrix eps = random_matrix(batch, a_dim, rng);
    const Matrix ga = random_matrix(batch, a_dim, rng);
    const Matrix gl = random_matrix(batch, 1, rng);
    auto loss = [&] {
      const auto s = sample_policy(actor.forward(obs), eps);
      return s.action.cwiseProduct(ga).sum() + s.log_prob.cwiseProduct(gl).sum();
    };
    auto back = [&] {
      actor.zero_grad();
      const auto s = sample_policy(actor.forward(obs), eps);
      actor.backward(sample_backward(s, ga, gl));
    };
    auto r = gradcheck(actor.named_parameters(), loss, back);
    r.name = "actor+squashed_sample";
    out.push_back(r);
  }
  {
    Actor actor(spec, a_dim, rng);
    const Matrix act = random_matrix(batch, a_dim, rng, 0.4).array().tanh().matrix();
    const Matrix gl = random_matrix(batch, 1, rng);
    auto loss = [&] { return log_prob(actor.forward(obs), act).cwiseProduct(gl).sum(); };
    auto back = [&] {
      actor.zero_grad();
      const Matrix head = actor.forward(obs);
      actor.backward(log_prob_backward(head, act, gl));
    };
    auto r = gradcheck(actor.named_parameters(), loss, back);
    r.name = "actor+log_prob";
    out.push_back(r);
  }
  {
    Critic critic(spec, a_dim, rng, 6);
    InputParam act(random_matrix(batch, a_dim, rng));
    const Matrix g1 = random_matrix(batch, 1, rng);
    const Matrix g2 = random_matrix(batch, 1, rng);
    auto params = critic.named_parameters();
    params.push_back({"action", &act.p});
    auto loss = [&] {
      const auto q = critic.forward(obs, act.p.value);
      return q.q1.cwiseProduct(g1).sum() + q.q2.cwiseProduct(g2).sum();
    };
    auto back = [&] {
      critic.zero_grad();
      critic.forward(obs, act.p.value);
      act.p.grad = critic.backward(g1, g2);
    };
    auto r = gradcheck(params, loss, back);
    r.name = "critic";
    out.push_back(r);
  }
  return out;
}

}  // namespace pih::nn
