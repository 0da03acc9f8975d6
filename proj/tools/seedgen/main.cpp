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

#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>

#include "commands.hpp"
#include "seedgen/errors.hpp"

namespace {

// "--a.b=value" arguments become config overrides; everything else goes to
// the parser.
bool is_override(const char* arg) {
  if (std::strncmp(arg, "--", 2) != 0) return false;
  const char* eq = std::strchr(arg, '=');
  const char* dot = std::strchr(arg, '.');
  return eq != nullptr && dot != nullptr && dot < eq;
}

void add_common(CLI::App* cmd, seedgen::cli::Common& common, bool needs_out) {
  cmd->add_option("--config", common.config, "JSON run config")->check(CLI::ExistingFile);
  cmd->add_option("--set", common.overrides, "Config override key.path=value (repeatable)");
  auto* out = cmd->add_option("--out", common.out, "Output directory");
  if (needs_out) out->required();
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  using namespace seedgen::cli;

  std::vector<std::string> overrides;
  std::vector<char*> args;
  for (int i = 0; i < argc; ++i) {
    if (i > 0 && is_override(argv[i])) {
      overrides.emplace_back(argv[i] + 2);
    } else {
      args.push_back(argv[i]);
    }
  }

  CLI::App app{"seedgen: steerable generative retrieval"};
  app.require_subcommand(1);
  Common common;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic world");
  add_common(synth, common, true);

  std::string train_data;
  auto* train = app.add_subcommand("train", "Train a diffusion or regression model");
  add_common(train, common, true);
  train->add_option("--data", train_data, "World directory")->required();

  SampleOptions sample_opts;
  auto* sample = app.add_subcommand("sample", "Draw target-space samples for queries");
  add_common(sample, common, true);
  sample->add_option("--ckpt", sample_opts.ckpt, "Checkpoint")->required();
  sample->add_option("--data", sample_opts.data, "World directory")->required();
  sample->add_option("--omega", sample_opts.omega, "Guidance scale");
  sample->add_option("--steps", sample_opts.steps, "Solver steps");
  sample->add_option("--steer", sample_opts.steers, "concept:strength, e.g. genre-3:+0.05 (repeatable)");
  sample->add_option("--slerp", sample_opts.slerp, "concept:ratio");
  sample->add_option("--seed", sample_opts.seed, "Sampler seed");
  sample->add_option("--n-per-query", sample_opts.n_per_query, "Samples per query");
  sample->add_option("--split", sample_opts.split, "eval, train or all");
  sample->add_option("--limit", sample_opts.limit, "Use only the first N queries");

  EvalOptionsCli eval_opts;
  auto* eval = app.add_subcommand("eval", "Score a checkpoint or a sample dump");
  add_common(eval, common, true);
  eval->add_option("--ckpt", eval_opts.ckpt, "Checkpoint");
  eval->add_option("--samples", eval_opts.samples, "samples.emb1 from `sample`");
  eval->add_option("--data", eval_opts.data, "World directory")->required();
  eval->add_option("--k", eval_opts.k_list, "Recall cutoffs")->delimiter(',');

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Guidance-scale sweep");
  add_common(sweep, common, true);
  sweep->add_option("--ckpt", sweep_opts.ckpt, "Diffusion checkpoint")->required();
  sweep->add_option("--data", sweep_opts.data, "World directory")->required();
  sweep->add_option("--omegas", sweep_opts.omegas, "Comma-separated guidance scales")->delimiter(',');
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads");

  ServeOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  add_common(serve, common, false);
  serve->add_option("--ckpt", serve_opts.ckpt, "Checkpoint")->required();
  serve->add_option("--data", serve_opts.data, "World directory")->required();
  serve->add_option("--host", serve_opts.host, "Bind address");
  serve->add_option("--port", serve_opts.port, "Port");
  serve->add_option("--ui", serve_opts.ui, "Static UI directory served at /ui");

  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  common.overrides.insert(common.overrides.begin(), overrides.begin(), overrides.end());

  try {
    if (*synth) return cmd_synth(common);
    if (*train) return cmd_train(common, train_data);
    if (*sample) return cmd_sample(common, sample_opts);
    if (*eval) return cmd_eval(common, eval_opts);
    if (*sweep) return cmd_sweep(common, sweep_opts);
    if (*serve) return cmd_serve(common, serve_opts);
  } catch (const seedgen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const seedgen::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const seedgen::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
