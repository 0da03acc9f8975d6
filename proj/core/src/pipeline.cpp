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

#include "seedgen/pipeline.hpp"

#include <numeric>

namespace seedgen {

Experiment make_experiment(const Catalog& catalog, const std::vector<ConceptProxy>& proxies,
                           const PairedDataset& pairs, const RunConfig& cfg) {
  Experiment ex;
  ex.catalog = catalog;
  ex.proxies = proxies;
  auto [train, eval] = split(pairs, cfg.eval.eval_fraction, cfg.world.seed);
  ex.train = std::move(train);
  if (cfg.eval.max_queries > 0 && cfg.eval.max_queries < eval.size()) {
    std::vector<std::size_t> rows(cfg.eval.max_queries);
    std::iota(rows.begin(), rows.end(), 0);
    eval = eval.subset(rows);
  }
  ex.eval = std::move(eval);
  return ex;
}

Experiment make_experiment(const World& world, const RunConfig& cfg) {
  return make_experiment(world.catalog, world.proxies, world.pairs, cfg);
}

Experiment make_experiment(const LoadedWorld& world, const RunConfig& cfg) {
  return make_experiment(world.catalog, world.proxies, world.pairs, cfg);
}

ScheduleConfig training_schedule(const RunConfig& cfg, const Experiment& ex) {
  ScheduleConfig s = cfg.schedule;
  if (cfg.train.estimate_sigma_data) s.sigma_data = estimate_sigma_data(target_matrix(ex.catalog, ex.train));
  s.validate();
  return s;
}

DenoiserModel train_diffusion(const RunConfig& cfg, const Experiment& ex, const StepCallback& on_step) {
  DiffusionTrainer t(cfg.network_spec(), training_schedule(cfg, ex), cfg.train);
  t.fit(ex.train.queries, target_matrix(ex.catalog, ex.train), on_step);
  return t.model();
}

RegressionModel train_regression(const RunConfig& cfg, const Experiment& ex, const StepCallback& on_step) {
  RegressionTrainer t(cfg.network_spec(), training_schedule(cfg, ex).sigma_data, cfg.train);
  t.fit(ex.train.queries, target_matrix(ex.catalog, ex.train), on_step);
  return t.model();
}

}  // namespace seedgen
