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
#include <numbers>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "seedgen/errors.hpp"
#include "seedgen/metrics.hpp"
#include "seedgen/rng.hpp"

namespace seedgen {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Oracle built on Eigen's own solver.
MatrixXd oracle_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

double oracle_fmd(const GaussianMoments& a, const GaussianMoments& b) {
  const MatrixXd ra = oracle_sqrt(a.covariance);
  const MatrixXd inner = oracle_sqrt(ra * b.covariance * ra);
  return (a.mean - b.mean).squaredNorm() + a.covariance.trace() + b.covariance.trace() - 2.0 * inner.trace();
}

MatrixXd random_spd(int n, std::uint64_t seed) {
  Rng rng(seed);
  const MatrixXd a = rng.normal_matrix(n, n);
  return a * a.transpose() / n + 0.1 * MatrixXd::Identity(n, n);
}

TEST(Eigen, JacobiMatchesOracle) {
  for (int n : {1, 2, 5, 16}) {
    const MatrixXd m = random_spd(n, std::uint64_t(n));
    const SymmetricEigen e = symmetric_eigen(m);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    EXPECT_LT((e.values - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * m.norm());
    EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - m).norm(), 1e-9 * m.norm());
    EXPECT_LT((e.vectors.transpose() * e.vectors - MatrixXd::Identity(n, n)).norm(), 1e-10);
  }
  EXPECT_THROW(symmetric_eigen(MatrixXd::Zero(2, 3)), ConfigError);
}

TEST(PsdSqrt, SquaresBack) {
  const MatrixXd m = random_spd(6, 3);
  const MatrixXd r = psd_sqrt(m);
  EXPECT_LT((r * r - m).norm(), 1e-10 * m.norm());
  EXPECT_LT((r - oracle_sqrt(m)).norm(), 1e-9);
  MatrixXd asym = m;
  asym(0, 1) += 1.0;
  EXPECT_THROW(psd_sqrt(asym), ConfigError);
}

TEST(Fmd, SelfDistanceIsZero) {
  Rng rng(1);
  const MatrixXd x = rng.normal_matrix(8, 300);
  EXPECT_LE(fmd(x, moments(x)), 1e-6);
}

TEST(Fmd, EqualCovarianceIsMeanGap) {
  GaussianMoments a{VectorXd::Random(5), random_spd(5, 2), 10};
  GaussianMoments b{VectorXd::Random(5), a.covariance, 10};
  EXPECT_NEAR(fmd(a, b), (a.mean - b.mean).squaredNorm(), 1e-6);
}

TEST(Fmd, OneDimensionalClosedForm) {
  GaussianMoments a{VectorXd::Constant(1, 0.3), MatrixXd::Constant(1, 1, 0.25), 2};
  GaussianMoments b{VectorXd::Constant(1, -0.2), MatrixXd::Constant(1, 1, 0.64), 2};
  EXPECT_NEAR(fmd(a, b), 0.5 * 0.5 + (0.5 - 0.8) * (0.5 - 0.8), 1e-4);
}

TEST(Fmd, MatchesOracleAndIsSymmetric) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    GaussianMoments a{VectorXd::Random(7), random_spd(7, 10 + s), 10};
    GaussianMoments b{VectorXd::Random(7), random_spd(7, 20 + s), 10};
    EXPECT_NEAR(fmd(a, b), oracle_fmd(a, b), 1e-8);
    EXPECT_NEAR(fmd(a, b), fmd(b, a), 1e-8);
    EXPECT_GE(fmd(a, b), 0.0);
  }
}

TEST(Moments, SampleCovariance) {
  MatrixXd x(1, 3);
  x << 1, 2, 3;
  const auto m = moments(x);
  EXPECT_DOUBLE_EQ(m.mean(0), 2.0);
  EXPECT_DOUBLE_EQ(m.covariance(0, 0), 1.0);
  EXPECT_THROW(moments(MatrixXd::Zero(2, 1)), ConfigError);
}

TEST(Miscs, IdenticalIsExactlyOne) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd v = rng.normal_matrix(16, 1).col(0);
    v.normalize();
    EXPECT_EQ(miscs(v.replicate(1, 50)), 1.0);
    EXPECT_EQ(miscs((3.7 * v).replicate(1, 7)), 1.0);
  }
}

TEST(Miscs, KnownValues) {
  EXPECT_DOUBLE_EQ(miscs(MatrixXd::Identity(4, 4)), 0.0);
  MatrixXd x(2, 3);
  x << 1, -1, 1, 0, 0, 0;
  // Pairs: (+1,-1) -1, (+1,+1) 1, (-1,+1) -1.
  EXPECT_DOUBLE_EQ(miscs(x), -1.0 / 3.0);
  EXPECT_THROW(miscs(MatrixXd::Ones(2, 1)), ConfigError);
  EXPECT_THROW(miscs(MatrixXd::Zero(2, 2)), ConfigError);
}

TEST(Alignment, MeansOfDots) {
  MatrixXd p(2, 2), g(2, 2);
  p << 1, 0, 0, 1;
  g << 1, 1, 0, 0;
  EXPECT_DOUBLE_EQ(alignment_m2m(p, g), 0.5);
  EXPECT_DOUBLE_EQ(alignment_m2c(p, p), 1.0);
  EXPECT_THROW(alignment_m2m(p, MatrixXd::Zero(2, 3)), ConfigError);

  // One image, two texts: mean of <i, tq_k> <p, tt_k>.
  MatrixXd img(1, 1), tq(1, 2), tt(2, 2), pred(2, 1);
  img << 2;
  tq << 1, 3;
  tt << 1, 0, 0, 1;
  pred << 0.5, 0.25;
  EXPECT_DOUBLE_EQ(alignment_m2i(pred, img, tq, tt), (2 * 0.5 + 6 * 0.25) / 2.0);
}

TEST(Triplet, CountsTiesAsHits) {
  MatrixXd p(2, 3), pos(2, 3), neg(2, 3);
  p << 1, 1, 1, 0, 0, 0;
  pos << 1, 0, 0, 0, 1, 1;
  neg << 0, 1, 0, 1, 0, 1;
  EXPECT_DOUBLE_EQ(triplet_accuracy(p, pos, neg), 2.0 / 3.0);
}

TEST(Entropy, UniformAndDegenerate) {
  std::vector<int> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_NEAR(entropy_at_k(ten, 10), std::log(10.0), 1e-9);
  std::vector<int> same(10, 3);
  EXPECT_EQ(entropy_at_k(same, 10), 0.0);
  std::vector<int> half{0, 0, 1, 1};
  EXPECT_NEAR(entropy_at_k(half, 2), std::numbers::ln2, 1e-15);
  EXPECT_THROW(entropy_at_k(std::vector<int>{}, 2), ConfigError);
  EXPECT_THROW(entropy_at_k(std::vector<int>{5}, 2), ConfigError);
}

TEST(Recall, HitsMissesAndEmpty) {
  const std::vector<std::size_t> ranked{4, 2, 9, 1};
  const std::vector<std::size_t> rel{9, 7};
  EXPECT_EQ(*recall_at_k(ranked, rel, 2), 0.0);
  EXPECT_EQ(*recall_at_k(ranked, rel, 3), 0.5);
  EXPECT_EQ(*recall_at_k(ranked, rel, 100), 0.5);
  EXPECT_FALSE(recall_at_k(ranked, std::vector<std::size_t>{}, 3).has_value());
  EXPECT_THROW(recall_at_k(ranked, rel, 0), ConfigError);
}

TEST(Report, JsonIsVersionedAndFlat) {
  MetricsReport r;
  r.model_kind = "diffusion";
  r.omega = 9.0;
  r.entropy_at[10] = 1.5;
  r.recall_at[100] = 0.25;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("v"), 1);
  EXPECT_EQ(j.at("entropy@10"), 1.5);
  EXPECT_EQ(j.at("recall@100"), 0.25);
  EXPECT_EQ(j.at("omega"), 9.0);
  EXPECT_FALSE(j.contains("m2i"));
}

}  // namespace
}  // namespace seedgen
