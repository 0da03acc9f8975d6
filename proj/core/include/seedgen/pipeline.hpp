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

// End-to-end plumbing shared by the command-line tool, the service and the
// acceptance suite: splitting a world, training either model kind, and
// drawing evaluation seeds.

#pragma once

#include <functional>
#include <vector>

#include "seedgen/config.hpp"
#include "seedgen/diffusion.hpp"
#include "seedgen/evaluation.hpp"
#include "seedgen/regression.hpp"
#include "seedgen/world.hpp"

namespace seedgen {

struct Experiment {
  Catalog catalog;
  std::vector<ConceptProxy> proxies;
  PairedDataset train;
  PairedDataset eval;  // truncated to eval.max_queries when that is set
};

// Split is seeded by the world seed so every command sees the same split.
Experiment make_experiment(const Catalog& catalog, const std::vector<ConceptProxy>& proxies,
                           const PairedDataset& pairs, const RunConfig& cfg);
Experiment make_experiment(const World& world, const RunConfig& cfg);
Experiment make_experiment(const LoadedWorld& world, const RunConfig& cfg);

using StepCallback = std::function<void(long step, double loss)>;

// Schedule with sigma_data taken from the training targets when
// train.estimate_sigma_data is set.
ScheduleConfig training_schedule(const RunConfig& cfg, const Experiment& ex);

DenoiserModel train_diffusion(const RunConfig& cfg, const Experiment& ex, const StepCallback& on_step = {});
RegressionModel train_regression(const RunConfig& cfg, const Experiment& ex, const StepCallback& on_step = {});

}  // namespace seedgen
