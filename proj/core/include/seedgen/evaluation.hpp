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

// Seed generation and scoring over an evaluation split: sampling (or
// predicting) seed embeddings per query, fused retrieval, and the full
// metric report.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "seedgen/diffusion.hpp"
#include "seedgen/metrics.hpp"
#include "seedgen/regression.hpp"
#include "seedgen/retrieval.hpp"
#include "seedgen/world.hpp"

namespace seedgen {

struct EvalOptions {
  std::vector<int> recall_k{10, 100};
  std::vector<int> entropy_k{10, 20, 50};
  std::uint64_t seed = 0;  // triplet negatives
};

// Reference state shared by every evaluation against one catalog.
struct EvalSetup {
  const Catalog* catalog = nullptr;
  const Index* index = nullptr;
  const std::vector<ConceptProxy>* proxies = nullptr;
  GaussianMoments reference;
  int num_genres = 0;

  static EvalSetup make(const Catalog& catalog, const Index& index,
                        const std::vector<ConceptProxy>& proxies);
};

using SamplerHook = std::function<void(std::size_t query, SamplerConfig& cfg)>;

// `count` samples per query column. The sampler seed for query i is
// derive_seed(base.seed, i); `hook` may adjust the per-query config
// (for example to add a steer toward a known genre).
std::vector<Eigen::MatrixXd> diffusion_seeds(const Denoiser& model, const ScheduleConfig& schedule,
                                             const SamplerConfig& base, const Eigen::MatrixXd& queries,
                                             int count, const SamplerHook& hook = {});

// The normalized prediction repeated `count` times per query.
std::vector<Eigen::MatrixXd> regression_seeds(const RegressionModel& model,
                                              const Eigen::MatrixXd& queries, int count);

// Fused top-k list for one query's seeds.
RankedList fused_retrieval(const Index& index, const Eigen::MatrixXd& seeds, int k);

MetricsReport evaluate_seeds(const EvalSetup& setup, const PairedDataset& eval,
                             const std::vector<Eigen::MatrixXd>& seeds, const EvalOptions& options);

}  // namespace seedgen
