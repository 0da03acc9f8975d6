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

#include <gtest/gtest.h>

#include "seedgen/errors.hpp"
#include "seedgen/metrics.hpp"
#include "seedgen/regression.hpp"
#include "support/fixtures.hpp"

namespace seedgen {
namespace {

using Eigen::MatrixXd;

TEST(Regression, FreshModelPredictsZero) {
  const RegressionTrainer t({4, 3, 8, 2, 4}, 0.2, TrainConfig{});
  const MatrixXd p = predict(t.model(), MatrixXd::Random(3, 5));
  EXPECT_EQ(p.norm(), 0.0);
  EXPECT_THROW(predict(t.model(), MatrixXd::Random(3, 5), true), NumericError);
  EXPECT_DOUBLE_EQ(t.model().noise_feature, 0.25 * std::log(0.2));
}

TEST(Regression, LearnsAndRepeatsExactly) {
  Rng rng(3);
  const MatrixXd q = rng.normal_matrix(3, 200);
  const MatrixXd z = (MatrixXd::Random(4, 3) * q).colwise().normalized();
  TrainConfig tc;
  tc.total_steps = 500;
  tc.warmup = 20;
  tc.batch_size = 32;
  tc.peak_lr = 3e-3;
  RegressionTrainer t({4, 3, 16, 2, 4}, 0.5, tc);
  double first = 0.0, last = 0.0;
  t.fit(q, z, [&](long s, double loss) {
    if (s < 20) first += loss / 20;
    if (s >= 480) last += loss / 20;
  });
  EXPECT_LT(last, 0.2 * first);

  const MatrixXd p = predict(t.model(), q.leftCols(10), true);
  for (Eigen::Index i = 0; i < p.cols(); ++i) EXPECT_NEAR(p.col(i).norm(), 1.0, 1e-12);
  EXPECT_GT((p.col(0) - p.col(1)).norm(), 1e-3);  // varies with q
  EXPECT_EQ(predict(t.model(), q.leftCols(10), true), p);
  EXPECT_EQ(miscs(p.col(3).replicate(1, 50)), 1.0);
  EXPECT_THROW(predict(t.model(), MatrixXd::Random(2, 1)), ConfigError);
}

TEST(Regression, SeedDeterministic) {
  Rng rng(4);
  const MatrixXd q = rng.normal_matrix(3, 64), z = rng.normal_matrix(4, 64);
  TrainConfig tc;
  tc.total_steps = 30;
  tc.warmup = 3;
  tc.batch_size = 8;
  RegressionTrainer a({4, 3, 8, 1, 4}, 0.5, tc), b({4, 3, 8, 1, 4}, 0.5, tc);
  a.fit(q, z);
  b.fit(q, z);
  EXPECT_EQ(a.model().params, b.model().params);
  EXPECT_THROW(RegressionTrainer({4, 3, 8, 1, 4}, 0.0, tc), ConfigError);
}

}  // namespace
}  // namespace seedgen
