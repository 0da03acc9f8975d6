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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seedgen::cli {

// Shared by every command: config file plus --a.b=value overrides.
struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

struct SampleOptions {
  std::string ckpt;
  std::string data;
  std::optional<double> omega;
  std::optional<int> steps;
  std::vector<std::string> steers;  // concept:strength
  std::optional<std::string> slerp;  // concept:ratio
  std::optional<std::uint64_t> seed;
  std::optional<int> n_per_query;
  std::string split = "eval";
  std::size_t limit = 0;
};

struct EvalOptionsCli {
  std::string ckpt;
  std::string samples;
  std::string data;
  std::vector<int> k_list;
};

struct SweepOptions {
  std::string ckpt;
  std::string data;
  std::vector<double> omegas;
  int jobs = 1;
};

struct ServeOptions {
  std::string ckpt;
  std::string data;
  std::string host = "127.0.0.1";
  int port = 8787;
  std::string ui;
};

int cmd_synth(const Common& common);
int cmd_train(const Common& common, const std::string& data);
int cmd_sample(const Common& common, const SampleOptions& opts);
int cmd_eval(const Common& common, const EvalOptionsCli& opts);
int cmd_sweep(const Common& common, const SweepOptions& opts);
int cmd_serve(const Common& common, const ServeOptions& opts);

}  // namespace seedgen::cli
