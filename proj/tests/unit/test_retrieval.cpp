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

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <gtest/gtest.h>

#include "seedgen/errors.hpp"
#include "seedgen/retrieval.hpp"
#include "support/fixtures.hpp"

namespace seedgen {
namespace {

using Eigen::MatrixXd;

Catalog random_catalog(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Catalog c;
  c.embeddings = testing::unit_columns(rng.normal_matrix(d, n));
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "it-%03d", i);
    c.ids.push_back(id);
    c.genres.push_back(i % 3);
  }
  return c;
}

// Brute-force oracle: score everything, full sort by (score desc, id asc).
std::vector<std::size_t> brute(const Catalog& c, const Eigen::VectorXd& q, int k) {
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = c.embeddings.col(Eigen::Index(a)).dot(q), sb = c.embeddings.col(Eigen::Index(b)).dot(q);
    if (sa != sb) return sa > sb;
    return c.ids[a] < c.ids[b];
  });
  order.resize(std::min<std::size_t>(order.size(), std::size_t(k)));
  return order;
}

TEST(TopK, MatchesBruteForce) {
  const Catalog c = random_catalog(200, 8, 1);
  const Index idx(c);
  Rng rng(2);
  const MatrixXd seeds = rng.normal_matrix(8, 10);
  const auto res = top_k(idx, seeds, 15);
  EXPECT_FALSE(res.truncated);
  ASSERT_EQ(res.lists.size(), 10u);
  for (Eigen::Index s = 0; s < seeds.cols(); ++s) {
    const auto expect = brute(c, seeds.col(s), 15);
    ASSERT_EQ(res.lists[std::size_t(s)].size(), 15u);
    for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(res.lists[std::size_t(s)][i].index, expect[i]);
    for (std::size_t i = 1; i < 15; ++i) {
      EXPECT_GE(res.lists[std::size_t(s)][i - 1].score, res.lists[std::size_t(s)][i].score);
    }
  }
}

TEST(TopK, TiesBreakByIdAndTruncate) {
  Catalog c;
  c.embeddings = MatrixXd::Zero(2, 3);
  c.embeddings.col(0) << 1, 0;
  c.embeddings.col(1) << 1, 0;
  c.embeddings.col(2) << 0, 1;
  c.ids = {"b", "a", "c"};
  c.genres = {0, 0, 1};
  const Index idx(c);
  MatrixXd q(2, 1);
  q << 1, 0;
  const auto res = top_k(idx, q, 5);
  EXPECT_TRUE(res.truncated);
  ASSERT_EQ(res.lists[0].size(), 3u);
  EXPECT_EQ(idx.id(res.lists[0][0].index), "a");
  EXPECT_EQ(idx.id(res.lists[0][1].index), "b");
  EXPECT_THROW(top_k(idx, q, 0), ConfigError);
  EXPECT_THROW(top_k(idx, MatrixXd::Zero(3, 1), 1), ConfigError);
}

TEST(Fuse, EqualsTopKOfMaxOverSeeds) {
  const Catalog c = random_catalog(150, 6, 3);
  const Index idx(c);
  Rng rng(4);
  const MatrixXd seeds = testing::unit_columns(rng.normal_matrix(6, 12));
  const RankedList fused = fuse(idx, top_k(idx, seeds, 20).lists, 20);
  const Eigen::VectorXd best = (c.embeddings.transpose() * seeds).rowwise().maxCoeff();
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (best(Eigen::Index(a)) != best(Eigen::Index(b))) return best(Eigen::Index(a)) > best(Eigen::Index(b));
    return c.ids[a] < c.ids[b];
  });
  ASSERT_EQ(fused.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(fused[i].index, order[i]);
    EXPECT_NEAR(fused[i].score, best(Eigen::Index(order[i])), 1e-12);
  }
}

TEST(Index, RejectsBadCatalogs) {
  Catalog empty;
  EXPECT_THROW(Index{empty}, DataError);
  Catalog c = random_catalog(5, 3, 1);
  c.embeddings.col(2) *= 2.0;
  EXPECT_THROW(Index{c}, DataError);
  c = random_catalog(5, 3, 1);
  c.genres.pop_back();
  EXPECT_THROW(Index{c}, DataError);
}

}  // namespace
}  // namespace seedgen
