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

// The single JSON run configuration consumed by the command-line tools and
// the service. Unknown keys are rejected so typos in sweeps fail loudly.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seedgen/diffusion.hpp"
#include "seedgen/nn.hpp"
#include "seedgen/schedule.hpp"
#include "seedgen/world.hpp"

namespace seedgen {

struct ModelConfig {
  int width = 64;
  int num_blocks = 6;
};

struct EvalConfig {
  int samples_per_query = 50;
  std::vector<int> recall_k{10, 100};
  std::vector<int> entropy_k{10, 20, 50};
  std::vector<double> omegas{-1.0, 0.0, 2.0, 5.0, 9.0, 11.0, 15.0};
  double eval_fraction = 0.2;
  std::size_t max_queries = 0;  // 0 keeps the whole split
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::string kind = "diffusion";  // or "regression"
  WorldConfig world;
  ModelConfig model;
  ScheduleConfig schedule;
  TrainConfig train;
  SamplerConfig sampler;
  EvalConfig eval;

  void validate() const;
  nn::NetworkSpec network_spec() const;
};

nlohmann::json to_json(const RunConfig& c);

// Parses and validates; throws ConfigError with the offending key path.
RunConfig parse_run_config(const nlohmann::json& j);

// `assignment` is "a.b.c=value". The value is parsed as JSON when it can be
// and taken as a string otherwise. Intermediate objects are created.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Reads `path` (empty means defaults), applies overrides in order, validates.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace seedgen
