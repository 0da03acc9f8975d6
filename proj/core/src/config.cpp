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

#include "seedgen/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "seedgen/errors.hpp"

namespace seedgen {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read_section(const json& j, const char* name, const std::set<std::string>& allowed, T& out) {
  if (!j.contains(name)) return;
  const json& s = j.at(name);
  check_keys(s, name, allowed);
  try {
    from_json(s, out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  if (kind != "diffusion" && kind != "regression") {
    throw ConfigError("kind must be \"diffusion\" or \"regression\"");
  }
  world.validate();
  network_spec().validate();
  schedule.validate();
  train.validate();
  sampler.validate(world.target_dim);
  if (eval.samples_per_query < 2) throw ConfigError("eval.samples_per_query must be >= 2");
  if (!(eval.eval_fraction > 0.0 && eval.eval_fraction < 1.0)) {
    throw ConfigError("eval.eval_fraction must lie in (0, 1)");
  }
  for (int k : eval.recall_k) {
    if (k < 1) throw ConfigError("eval.recall_k entries must be >= 1");
  }
  for (int k : eval.entropy_k) {
    if (k < 1) throw ConfigError("eval.entropy_k entries must be >= 1");
  }
  for (double w : eval.omegas) {
    if (!std::isfinite(w)) throw ConfigError("eval.omegas must be finite");
  }
}

nn::NetworkSpec RunConfig::network_spec() const {
  nn::NetworkSpec s;
  s.input_dim = world.target_dim;
  s.cond_dim = world.query_dim;
  s.width = model.width;
  s.num_blocks = model.num_blocks;
  s.output_dim = world.target_dim;
  return s;
}

json to_json(const RunConfig& c) {
  json j;
  j["kind"] = c.kind;
  j["world"] = c.world;
  j["model"] = {{"width", c.model.width}, {"num_blocks", c.model.num_blocks}};
  j["schedule"] = c.schedule;
  j["train"] = c.train;
  j["sampler"] = c.sampler;
  j["eval"] = {{"samples_per_query", c.eval.samples_per_query},
               {"recall_k", c.eval.recall_k},
               {"entropy_k", c.eval.entropy_k},
               {"omegas", c.eval.omegas},
               {"eval_fraction", c.eval.eval_fraction},
               {"max_queries", c.eval.max_queries},
               {"seed", c.eval.seed}};
  return j;
}

RunConfig parse_run_config(const json& j) {
  check_keys(j, "config", {"kind", "world", "model", "schedule", "train", "sampler", "eval"});
  RunConfig c;
  try {
    c.kind = j.value("kind", c.kind);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kind: ") + e.what());
  }
  read_section(j, "world", {"target_dim", "query_dim", "num_genres", "items_per_genre",
                            "cluster_concentration", "query_noise", "ambiguity", "mixture_concentration",
                            "queries_per_item", "seed"}, c.world);
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"width", "num_blocks"});
    try {
      c.model.width = m.value("width", c.model.width);
      c.model.num_blocks = m.value("num_blocks", c.model.num_blocks);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }
  read_section(j, "schedule", {"sigma_data", "alpha_max", "sigma_max", "sigma_min"}, c.schedule);
  read_section(j, "train", {"p_mask", "batch_size", "total_steps", "warmup", "peak_lr", "seed",
                            "estimate_sigma_data"}, c.train);
  read_section(j, "sampler", {"steps", "rho", "omega", "drift_form", "post_normalize", "seed"}, c.sampler);
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e, "eval", {"samples_per_query", "recall_k", "entropy_k", "omegas", "eval_fraction",
                           "max_queries", "seed"});
    try {
      c.eval.samples_per_query = e.value("samples_per_query", c.eval.samples_per_query);
      c.eval.recall_k = e.value("recall_k", c.eval.recall_k);
      c.eval.entropy_k = e.value("entropy_k", c.eval.entropy_k);
      c.eval.omegas = e.value("omegas", c.eval.omegas);
      c.eval.eval_fraction = e.value("eval_fraction", c.eval.eval_fraction);
      c.eval.max_queries = e.value("max_queries", c.eval.max_queries);
      c.eval.seed = e.value("seed", c.eval.seed);
    } catch (const json::exception& ex) {
      throw ConfigError(std::string("eval: ") + ex.what());
    }
  }
  c.validate();
  return c;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty path segment");
    if (!node->is_object()) throw ConfigError("override '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(j, o);
  return parse_run_config(j);
}

}  // namespace seedgen
