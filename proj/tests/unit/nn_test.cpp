#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "pih/nn/adam.hpp"
#include "pih/nn/checkpoint.hpp"
#include "pih/nn/gradcheck.hpp"
#include "pih/nn/layers.hpp"
#include "pih/nn/networks.hpp"
#include "pih/nn/policy_head.hpp"
#include "pih/nn/sequential.hpp"
#include "pih/nn/tensor.hpp"

namespace pih::nn {
namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

TEST(Tensor, ShapeAndConversion) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5, 0.0)), std::invalid_argument);
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Tensor t = Tensor::from_matrix(m);
  EXPECT_EQ(t.shape, (std::vector<int>{2, 3}));
  EXPECT_EQ(t.values, (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(t.to_matrix(), m);
  EXPECT_TRUE(t.all_finite());
  m(0, 0) = std::nan("");
  EXPECT_FALSE(all_finite(m));
}

TEST(Forward, ZeroNetworkGivesZero) {
  std::mt19937_64 rng(1);
  Dense d(4, 3, rng);
  d.weight().value.setZero();
  d.bias().value.setZero();
  EXPECT_EQ(d.forward(random_matrix(5, 4, rng)), Matrix::Zero(5, 3));
}

TEST(Forward, ReluOfNegativeIsZero) {
  ReLU r(6);
  std::mt19937_64 rng(2);
  const Matrix x = random_matrix(3, 6, rng).cwiseAbs().array() + 0.1;
  EXPECT_EQ(r.forward(-x), Matrix::Zero(3, 6));
  EXPECT_EQ(r.forward(x), x);
}

TEST(Forward, MatchesReferenceLoops) {
  std::mt19937_64 rng(3);
  const int h = 7, w = 6, cin = 3, cout = 4, k = 3, s = 2;
  Conv2d conv(h, w, cin, cout, k, s, rng);
  Dense dense(conv.out_dim(), 5, rng);
  Sequential net;
  net.add(std::make_unique<Conv2d>(conv)).emplace<ReLU>(conv.out_dim()).add(std::make_unique<Dense>(dense)).emplace<Tanh>(5);
  const Matrix x = random_matrix(2, h * w * cin, rng);
  const Matrix y = net.forward(x);

  const Matrix& W = conv.parameters()[0]->value;
  const Matrix& B = conv.parameters()[1]->value;
  const int oh = (h - k) / s + 1;
  const int ow = (w - k) / s + 1;
  for (int n = 0; n < 2; ++n) {
    std::vector<double> feat(static_cast<std::size_t>(oh * ow * cout));
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox)
        for (int co = 0; co < cout; ++co) {
          double acc = B(0, co);
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx)
              for (int ci = 0; ci < cin; ++ci)
                acc += x(n, ((oy * s + ky) * w + ox * s + kx) * cin + ci) * W((ky * k + kx) * cin + ci, co);
          feat[static_cast<std::size_t>((oy * ow + ox) * cout + co)] = std::max(0.0, acc);
        }
    for (int j = 0; j < 5; ++j) {
      double acc = dense.bias().value(0, j);
      for (std::size_t i = 0; i < feat.size(); ++i) acc += feat[i] * dense.weight().value(static_cast<Eigen::Index>(i), j);
      EXPECT_NEAR(y(n, j), std::tanh(acc), 1e-13);
    }
  }
}

TEST(Forward, ShapeMismatchThrows) {
  std::mt19937_64 rng(4);
  Dense d(4, 3, rng);
  EXPECT_THROW(d.forward(Matrix::Zero(2, 5)), std::invalid_argument);
  Sequential s;
  s.emplace<Dense>(4, 3, rng);
  EXPECT_THROW(s.emplace<Dense>(4, 2, rng), std::invalid_argument);
}

TEST(Backward, WithoutForwardThrows) {
  std::mt19937_64 rng(5);
  Dense d(2, 2, rng);
  EXPECT_THROW(d.backward(Matrix::Zero(1, 2)), std::logic_error);
  ReLU r(2);
  EXPECT_THROW(r.backward(Matrix::Zero(1, 2)), std::logic_error);
}

TEST(Backward, LinearSquaredLossClosedForm) {
  std::mt19937_64 rng(6);
  Dense d(3, 2, rng);
  d.bias().value.setZero();
  const Matrix x = random_matrix(4, 3, rng);
  const Matrix target = random_matrix(4, 2, rng);
  const Matrix pred = d.forward(x);
  d.weight().grad.setZero();
  d.backward(2.0 * (pred - target));
  const Matrix expected = 2.0 * x.transpose() * (x * d.weight().value - target);
  EXPECT_LT((d.weight().grad - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Backward, ConstantLossHasZeroGradient) {
  std::mt19937_64 rng(7);
  Sequential net;
  net.emplace<Dense>(3, 4, rng).emplace<Tanh>(4).emplace<Dense>(4, 1, rng);
  net.zero_grad();
  net.forward(random_matrix(5, 3, rng));
  const Matrix gin = net.backward(Matrix::Zero(5, 1));
  EXPECT_EQ(gin, Matrix::Zero(5, 3));
  for (Parameter* p : net.parameters()) EXPECT_EQ(p->grad, Matrix::Zero(p->grad.rows(), p->grad.cols()));
}

TEST(GradCheck, ThreeLayerNet) {
  std::mt19937_64 rng(8);
  Sequential net;
  net.emplace<Dense>(5, 7, rng).emplace<Tanh>(7).emplace<Dense>(7, 6, rng).emplace<ReLU>(6).emplace<Dense>(6, 2, rng);
  const Matrix x = random_matrix(4, 5, rng);
  const Matrix target = random_matrix(4, 2, rng);
  auto loss = [&] { return (net.forward(x) - target).squaredNorm(); };
  auto backward = [&] {
    net.zero_grad();
    net.backward(2.0 * (net.forward(x) - target));
  };
  const auto r = gradcheck(net.named_parameters("net."), loss, backward, 1e-5);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst;
  EXPECT_EQ(r.checked, parameter_count(net.parameters()));
}

TEST(GradCheck, AllBuiltInChecksPass) {
  const auto results = gradcheck_all(0);
  std::set<std::string> names;
  for (const auto& r : results) {
    EXPECT_LT(r.max_rel_error, 1e-4) << r.name << " worst " << r.worst;
    EXPECT_GT(r.checked, 0u) << r.name;
    names.insert(r.name);
  }
  for (const char* kind : {"dense", "conv2d", "relu", "tanh"}) {
    bool found = false;
    for (const auto& n : names) found = found || n.find(kind) != std::string::npos;
    EXPECT_TRUE(found) << kind;
  }
}

TEST(Adam, ZeroGradientKeepsParametersAndDecaysMoments) {
  Parameter p{"p", Matrix::Constant(1, 3, 0.5), Matrix::Zero(1, 3)};
  Adam opt({&p}, {0.1});
  p.grad << 1.0, -2.0, 0.5;
  opt.step();
  const Matrix after_first = p.value;
  const Matrix m1 = opt.first_moments()[0];
  const Matrix v1 = opt.second_moments()[0];
  opt.zero_grad();
  // Still moves (momentum), so compare a fresh optimizer from zero moments.
  Parameter q{"q", Matrix::Constant(1, 3, 0.5), Matrix::Zero(1, 3)};
  Adam fresh({&q});
  fresh.step();
  EXPECT_EQ(q.value, Matrix::Constant(1, 3, 0.5));
  opt.step();
  EXPECT_LT((opt.first_moments()[0] - 0.9 * m1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((opt.second_moments()[0] - 0.999 * v1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NE(p.value, after_first);
}

TEST(Adam, FirstStepMatchesClosedForm) {
  Parameter p{"p", Matrix::Constant(1, 2, 1.0), Matrix::Zero(1, 2)};
  Adam opt({&p}, {0.01});
  p.grad << 0.3, -4.0;
  opt.step();
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  EXPECT_NEAR(p.value(0, 0), 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(p.value(0, 1), 1.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientStepApproachesLrSign) {
  Parameter p{"p", Matrix::Zero(1, 2), Matrix::Zero(1, 2)};
  Adam opt({&p}, {1e-3});
  Matrix prev = p.value;
  Matrix last_step;
  for (int i = 0; i < 5000; ++i) {
    p.grad << 2.5, -0.02;
    opt.step();
    last_step = p.value - prev;
    prev = p.value;
  }
  EXPECT_NEAR(last_step(0, 0), -1e-3, 1e-9);
  EXPECT_NEAR(last_step(0, 1), 1e-3, 1e-9);
}

TEST(Adam, NonFiniteGradientLeavesParametersUntouched) {
  Parameter a{"a", Matrix::Constant(1, 2, 1.0), Matrix::Constant(1, 2, 0.1)};
  Parameter b{"b", Matrix::Constant(2, 1, 2.0), Matrix::Zero(2, 1)};
  Adam opt({&a, &b});
  b.grad(1, 0) = std::nan("");
  EXPECT_THROW(opt.step(), NonFiniteGradientError);
  EXPECT_EQ(a.value, Matrix::Constant(1, 2, 1.0));
  EXPECT_EQ(b.value, Matrix::Constant(2, 1, 2.0));
  EXPECT_EQ(opt.steps(), 0);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    std::mt19937_64 rng(9);
    Dense d(3, 2, rng);
    Adam opt(d.parameters(), {0.01});
    const Matrix x = random_matrix(8, 3, rng);
    for (int i = 0; i < 50; ++i) {
      opt.zero_grad();
      d.backward(2.0 * d.forward(x));
      opt.step();
    }
    return d.weight().value;
  };
  EXPECT_EQ(run(), run());
}

TEST(PolicyHead, NearDeterministicLimit) {
  Matrix head(1, 4);
  head << 0.3, -0.7, -20.0, -20.0;  // log-std clamped to -5
  Matrix eps(1, 2);
  eps << 0.5, -1.0;
  const PolicySample s = sample_policy(head, eps);
  EXPECT_EQ(s.log_std, Matrix::Constant(1, 2, kLogStdMin));
  EXPECT_NEAR(s.action(0, 0), std::tanh(0.3), 0.01);
  EXPECT_NEAR(s.action(0, 1), std::tanh(-0.7), 0.01);
  EXPECT_TRUE(std::isfinite(s.log_prob(0, 0)));
  EXPECT_GT(s.log_prob(0, 0), 5.0);
  const Matrix mean = mean_action(head);
  EXPECT_NEAR(mean(0, 0), std::tanh(0.3), 1e-15);
  EXPECT_NEAR(mean(0, 1), std::tanh(-0.7), 1e-15);
}

TEST(PolicyHead, SamplesStayInBounds) {
  RandomStream s(1);
  Matrix head(1000, 12);
  std::mt19937_64 rng(2);
  head.leftCols(6) = random_matrix(1000, 6, rng, 5.0);
  head.rightCols(6) = Matrix::Constant(1000, 6, kLogStdMax + 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    const PolicySample p = sample_policy(head, s);
    ASSERT_LE(p.action.cwiseAbs().maxCoeff(), 1.0);
    ASSERT_TRUE(all_finite(p.log_prob));
  }
}

TEST(PolicyHead, MonteCarloMeanMatchesPrediction) {
  // Small std: E[tanh(mu + s eps)] ~= tanh(mu) - s^2 tanh(mu) (1 - tanh(mu)^2).
  const double mu = 0.4;
  const double sd = 0.05;
  const int n = 100000;
  Matrix head(n, 2);
  head.col(0).setConstant(mu);
  head.col(1).setConstant(std::log(sd));
  RandomStream s(3);
  const PolicySample p = sample_policy(head, s);
  const double mean = p.action.col(0).mean();
  const double t = std::tanh(mu);
  const double predicted = t - sd * sd * t * (1 - t * t);
  const double sigma = std::sqrt((p.action.col(0).array() - mean).square().sum() / (n - 1));
  EXPECT_LT(std::abs(mean - predicted), 3.0 * sigma / std::sqrt(n));
}

TEST(PolicyHead, DensityIntegratesToOne) {
  // 1-D head: integrate exp(log_prob) over (-1, 1) by importance sampling
  // from the uniform distribution.
  Matrix head(1, 2);
  head << 0.3, std::log(0.6);
  const int n = 200000;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix heads = head.replicate(n, 1);
  Matrix a(n, 1);
  for (int i = 0; i < n; ++i) a(i, 0) = u(rng);
  const Matrix lp = log_prob(heads, a);
  const double integral = 2.0 * lp.array().exp().mean();
  EXPECT_NEAR(integral, 1.0, 0.01);
}

TEST(PolicyHead, LogProbAgreesWithSample) {
  RandomStream s(5);
  std::mt19937_64 rng(6);
  Matrix head = random_matrix(20, 6, rng, 0.5);
  const PolicySample p = sample_policy(head, s);
  const Matrix lp = log_prob(head, p.action);
  EXPECT_LT((lp - p.log_prob).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(PolicyHead, Log1mTanh2IsStable) {
  for (double u : {0.0, 0.5, 3.0, 20.0, 400.0, -400.0}) {
    const double v = log1m_tanh2(u);
    EXPECT_TRUE(std::isfinite(v));
    if (std::abs(u) < 10) {
      EXPECT_NEAR(v, std::log(1 - std::tanh(u) * std::tanh(u)), 1e-12);
    }
  }
  EXPECT_NEAR(log1m_tanh2(400.0), std::log(4.0) - 800.0, 1e-9);
}

TEST(Networks, ParameterCountStableAcrossUpdates) {
  std::mt19937_64 rng(7);
  EncoderSpec spec;
  spec.image_h = 16;
  spec.image_w = 16;
  Actor actor(spec, 6, rng);
  const std::size_t before = parameter_count(actor.parameters());
  Adam opt(actor.parameters(), {1e-3});
  ObsBatch obs{random_matrix(3, spec.image_dim(), rng), random_matrix(3, spec.vec_dim, rng)};
  for (int i = 0; i < 3; ++i) {
    actor.zero_grad();
    actor.backward(actor.forward(obs));
    opt.step();
  }
  EXPECT_EQ(parameter_count(actor.parameters()), before);
  const Matrix out = actor.forward(obs);
  EXPECT_EQ(out.cols(), 12);
  EXPECT_TRUE(all_finite(out));
}

TEST(Networks, NoImageBranch) {
  std::mt19937_64 rng(8);
  EncoderSpec spec;
  spec.image_h = 0;
  spec.image_w = 0;
  DeterministicPolicy pol(spec, 6, rng);
  ObsBatch obs{Matrix(2, 0), random_matrix(2, spec.vec_dim, rng)};
  EXPECT_EQ(pol.forward(obs).cols(), 6);
}

TEST(Polyak, TauOneCopiesAndZeroKeeps) {
  Parameter a{"a", Matrix::Constant(2, 2, 1.0), Matrix::Zero(2, 2)};
  Parameter b{"b", Matrix::Constant(2, 2, 3.0), Matrix::Zero(2, 2)};
  polyak_update({&a}, {&b}, 0.0);
  EXPECT_EQ(a.value, Matrix::Constant(2, 2, 1.0));
  polyak_update({&a}, {&b}, 0.25);
  EXPECT_EQ(a.value, Matrix::Constant(2, 2, 1.5));
  polyak_update({&a}, {&b}, 1.0);
  EXPECT_EQ(a.value, b.value);
}

TEST(Checkpoint, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  EncoderSpec spec;
  spec.image_h = 16;
  spec.image_w = 16;
  Actor a(spec, 6, rng);
  Actor b(spec, 6, rng);
  std::stringstream io;
  write_checkpoint(io, a.named_parameters());
  load_checkpoint(io, b.named_parameters());
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
}

TEST(Checkpoint, ManifestMismatchAndCorruptionAreErrors) {
  std::mt19937_64 rng(10);
  Dense d(3, 2, rng);
  Dense other(3, 4, rng);
  std::vector<NamedParameter> np{{"W", &d.weight()}, {"b", &d.bias()}};
  std::vector<NamedParameter> op{{"W", &other.weight()}, {"b", &other.bias()}};
  std::stringstream io;
  write_checkpoint(io, np);
  const std::string bytes = io.str();
  std::stringstream in1(bytes);
  EXPECT_THROW(load_checkpoint(in1, op), CheckpointError);
  std::stringstream in2(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(load_checkpoint(in2, np), CheckpointError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream in3(bad);
  EXPECT_THROW(load_checkpoint(in3, np), CheckpointError);
  std::stringstream in4(bytes);
  const auto entries = read_checkpoint(in4);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].first, "W");
  EXPECT_EQ(entries[0].second, d.weight().value);
}

}  // namespace
}  // namespace pih::nn
