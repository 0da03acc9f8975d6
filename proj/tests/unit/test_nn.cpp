// Copyright 2026 The seedgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "seedgen/errors.hpp"
#include "seedgen/nn.hpp"
#include "support/fixtures.hpp"
#include "support/reference_net.hpp"

namespace seedgen::nn {
namespace {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;
using seedgen::testing::random_params;

NetworkSpec tiny_spec() { return {3, 2, 5, 2, 3}; }

double objective(const Network& net, const MatrixXd& x, const RowVectorXd& noise, const MatrixXd& cond,
                 const MatrixXd& upstream) {
  return net.forward(x, noise, cond).cwiseProduct(upstream).sum();
}

TEST(ParamLayout, OrderAndSizes) {
  const auto layout = ParamLayout::for_spec(tiny_spec());
  const auto& s = layout.slots();
  ASSERT_EQ(s.size(), 6u + 4u * 2u + 2u);
  EXPECT_EQ(s.front().name, "stem.w");
  EXPECT_EQ(s.back().name, "out.b");
  EXPECT_EQ(layout.find("stem.w").rows, 5);
  EXPECT_EQ(layout.find("stem.w").cols, 5);
  EXPECT_EQ(layout.find("noise.w2").rows, 2 * 5 * 2);
  EXPECT_EQ(layout.find("block1.w1").cols, 5 + 2);
  std::size_t offset = 0;
  for (const auto& slot : s) {
    EXPECT_EQ(slot.offset, offset) << slot.name;
    offset += slot.size();
  }
  EXPECT_EQ(layout.total_size(), offset);
  EXPECT_THROW(layout.find("block9.w1"), ConfigError);
}

TEST(NetworkSpec, RejectsNonPositiveDims) {
  NetworkSpec s = tiny_spec();
  s.width = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_THROW(init_params(s, 1), ConfigError);
}

TEST(Network, FreshInitOutputsZero) {
  const Params p = init_params(tiny_spec(), 3);
  const auto [y, trace] = forward(p, VectorXd::Random(3), 0.4, VectorXd::Random(2));
  EXPECT_EQ(y.norm(), 0.0);
}

TEST(Network, InitIsSeedDeterministic) {
  EXPECT_EQ(init_params(tiny_spec(), 5), init_params(tiny_spec(), 5));
  EXPECT_NE(init_params(tiny_spec(), 5), init_params(tiny_spec(), 6));
}

TEST(Network, MatchesScalarReference) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Params p = random_params(tiny_spec(), seed);
    const VectorXd x = VectorXd::Random(3), c = VectorXd::Random(2);
    const auto [y, trace] = forward(p, x, -0.7, c);
    const auto ref = seedgen::testing::reference_forward(
        p, std::vector<double>(x.data(), x.data() + 3), -0.7, std::vector<double>(c.data(), c.data() + 2));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(y(i), ref[std::size_t(i)], 1e-12 * (1 + std::abs(ref[std::size_t(i)])));
  }
}

TEST(Network, BatchedEqualsPerColumn) {
  const Params p = random_params(tiny_spec(), 11);
  const Network net(p);
  const MatrixXd x = MatrixXd::Random(3, 4), c = MatrixXd::Random(2, 4);
  RowVectorXd noise(4);
  noise << -1.0, 0.0, 0.5, 2.0;
  const MatrixXd y = net.forward(x, noise, c);
  for (int b = 0; b < 4; ++b) {
    const auto [yb, tr] = forward(p, x.col(b), noise(b), c.col(b));
    EXPECT_LT((y.col(b) - yb).norm(), 1e-12);
  }
  // A single shared noise entry broadcasts.
  const MatrixXd shared = net.forward(x, RowVectorXd::Constant(1, 0.5), c);
  const MatrixXd spelled = net.forward(x, RowVectorXd::Constant(4, 0.5), c);
  EXPECT_LT((shared - spelled).norm(), 1e-12);
}

TEST(Network, RejectsShapeMismatch) {
  const Network net(init_params(tiny_spec(), 1));
  EXPECT_THROW(net.forward(MatrixXd::Zero(4, 2), RowVectorXd::Zero(1), MatrixXd::Zero(2, 2)), ConfigError);
  EXPECT_THROW(net.forward(MatrixXd::Zero(3, 2), RowVectorXd::Zero(3), MatrixXd::Zero(2, 2)), ConfigError);
  ForwardTrace tr;
  net.forward(MatrixXd::Zero(3, 2), RowVectorXd::Zero(1), MatrixXd::Zero(2, 2), &tr);
  EXPECT_THROW(grad_params(tr, MatrixXd::Zero(3, 3)), ConfigError);
}

// Central differences on the float parameters, divided by the perturbation
// the network actually saw after rounding.
TEST(Gradients, ParamsMatchFiniteDifferences) {
  const NetworkSpec spec = tiny_spec();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Params p = random_params(spec, seed, 0.4);
    const MatrixXd x = MatrixXd::Random(3, 3), c = MatrixXd::Random(2, 3), up = MatrixXd::Random(3, 3);
    RowVectorXd noise(3);
    noise << 0.3, -0.2, 1.1;
    ForwardTrace tr;
    Network(p).forward(x, noise, c, &tr);
    const ParamGradients g = grad_params(tr, up);
    ASSERT_EQ(g.values.size(), p.values.size());
    for (std::size_t i = 0; i < p.values.size(); i += 3) {
      const float orig = p.values[i];
      p.values[i] = orig + 1e-3f;
      const float hi = p.values[i];
      const double fp = objective(Network(p), x, noise, c, up);
      p.values[i] = orig - 1e-3f;
      const float lo = p.values[i];
      const double fm = objective(Network(p), x, noise, c, up);
      p.values[i] = orig;
      const double fd = (fp - fm) / (double(hi) - double(lo));
      EXPECT_NEAR(g.values[i], fd, 1e-5 + 1e-4 * std::abs(fd)) << "param " << i;
    }
  }
}

TEST(Gradients, InputVjpMatchesFiniteDifferences) {
  const Params p = random_params(tiny_spec(), 21, 0.4);
  const Network net(p);
  const MatrixXd x = MatrixXd::Random(3, 2), c = MatrixXd::Random(2, 2), up = MatrixXd::Random(3, 2);
  const RowVectorXd noise = RowVectorXd::Constant(1, -0.4);
  ForwardTrace tr;
  net.forward(x, noise, c, &tr);
  const MatrixXd v = vjp_input(tr, up);
  ASSERT_EQ(v.rows(), 3);
  const double h = 1e-6;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 3; ++i) {
      MatrixXd xp = x, xm = x;
      xp(i, b) += h;
      xm(i, b) -= h;
      const double fd = (objective(net, xp, noise, c, up) - objective(net, xm, noise, c, up)) / (2 * h);
      EXPECT_NEAR(v(i, b), fd, 1e-7 + 1e-6 * std::abs(fd));
    }
  }
}

TEST(Adam, FirstStepMatchesClosedForm) {
  Params p = init_params(tiny_spec(), 2);
  const Params before = p;
  OptimizerState st = OptimizerState::for_params(p);
  ParamGradients g{std::vector<double>(p.values.size())};
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = std::sin(double(i)) * 0.1;
  adam_step(st, p, g, 0.01);
  EXPECT_EQ(st.step, 1);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    // After one step the bias-corrected moments are g and g^2.
    const double gi = g.values[i];
    const double expect = double(before.values[i]) - 0.01 * gi / (std::abs(gi) + 1e-8);
    EXPECT_NEAR(p.values[i], expect, 1e-6);
  }
}

TEST(Adam, RejectsNonFiniteWithoutMutation) {
  Params p = init_params(tiny_spec(), 2);
  const Params before = p;
  OptimizerState st = OptimizerState::for_params(p);
  ParamGradients g{std::vector<double>(p.values.size(), 0.0)};
  g.values[4] = std::nan("");
  EXPECT_THROW(adam_step(st, p, g, 0.01), NumericError);
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 0);
  g.values[4] = 0.0;
  EXPECT_THROW(adam_step(st, p, g, 0.0), ConfigError);
  g.values.pop_back();
  EXPECT_THROW(adam_step(st, p, g, 0.01), ConfigError);
}

TEST(CosineLr, WarmupPeakAndDecay) {
  EXPECT_DOUBLE_EQ(cosine_lr(0, 10, 110, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(cosine_lr(5, 10, 110, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(cosine_lr(10, 10, 110, 1.0), 1.0);
  EXPECT_NEAR(cosine_lr(60, 10, 110, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(cosine_lr(110, 10, 110, 1.0), 0.0, 1e-12);
  for (long s = 10; s < 110; ++s) EXPECT_GE(cosine_lr(s, 10, 110, 2.0), cosine_lr(s + 1, 10, 110, 2.0));
  EXPECT_THROW(cosine_lr(0, 20, 10, 1.0), ConfigError);
  EXPECT_THROW(cosine_lr(11, 0, 10, 1.0), ConfigError);
}

}  // namespace
}  // namespace seedgen::nn
