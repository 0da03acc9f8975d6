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

#include "commands.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "manifest.hpp"
#include "seedgen/checkpoint.hpp"
#include "seedgen/emb_io.hpp"
#include "seedgen/errors.hpp"
#include "seedgen/pipeline.hpp"
#include "seedgen/service.hpp"

namespace seedgen::cli {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

fs::path make_out_dir(const std::string& out) {
  if (out.empty()) throw ConfigError("--out is required");
  fs::create_directories(out);
  return fs::path(out);
}

// Base config: --config if given, else the run config embedded in the
// checkpoint. Overrides apply last.
RunConfig resolve_config(const Common& common, const Checkpoint* ckpt) {
  json base = json::object();
  if (!common.config.empty()) {
    std::ifstream in(common.config);
    if (!in) throw ConfigError("cannot open config '" + common.config + "'");
    base = json::parse(in, nullptr, false);
    if (base.is_discarded()) throw ConfigError("config '" + common.config + "' is not valid JSON");
  } else if (ckpt && ckpt->meta.contains("run_config")) {
    base = ckpt->meta.at("run_config");
  }
  for (const auto& o : common.overrides) apply_override(base, o);
  return parse_run_config(base);
}

struct LoadedModel {
  Checkpoint ckpt;
  std::optional<DenoiserModel> diffusion;
  std::optional<RegressionModel> regression;
};

LoadedModel load_model(const std::string& path) {
  if (path.empty()) throw ConfigError("--ckpt is required");
  LoadedModel m{load_checkpoint(path), std::nullopt, std::nullopt};
  if (m.ckpt.kind == "diffusion") {
    m.diffusion = denoiser_from(m.ckpt);
  } else if (m.ckpt.kind == "regression") {
    m.regression = regression_from(m.ckpt);
  } else {
    throw DataError("checkpoint: unknown kind '" + m.ckpt.kind + "'");
  }
  return m;
}

const ConceptProxy& find_concept(const std::vector<ConceptProxy>& proxies, const std::string& name) {
  const bool numeric = !name.empty() && name.find_first_not_of("0123456789") == std::string::npos;
  const std::string id = numeric ? "genre-" + name : name;
  for (const auto& p : proxies) {
    if (p.id == id) return p;
  }
  throw ConfigError("unknown concept '" + name + "'");
}

std::pair<std::string, double> split_pair(const std::string& spec, const char* what) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError(std::string(what) + " '" + spec + "' is not name:value");
  try {
    std::size_t used = 0;
    const std::string tail = spec.substr(colon + 1);
    const double v = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(tail);
    return {spec.substr(0, colon), v};
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(what) + " '" + spec + "' has a non-numeric value");
  }
}

std::vector<MatrixXd> draw_seeds(const LoadedModel& m, const SamplerConfig& sampler, const MatrixXd& queries,
                                 int count) {
  if (m.diffusion) {
    const NetworkDenoiser d(*m.diffusion);
    return diffusion_seeds(d, m.diffusion->schedule, sampler, queries, count);
  }
  return regression_seeds(*m.regression, queries, count);
}

// Pairs whose ids appear in `ids`, in that order.
PairedDataset pairs_by_id(const PairedDataset& all, const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < all.size(); ++i) row.emplace(all.ids[i], i);
  std::vector<std::size_t> rows;
  for (const auto& id : ids) {
    const auto it = row.find(id);
    if (it == row.end()) throw DataError("unknown query id '" + id + "'");
    rows.push_back(it->second);
  }
  return all.subset(rows);
}

std::string format_omega(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

void log_progress(const char* what, long total) {
  std::cerr << what << ": " << total << " steps\n";
}

}  // namespace

int cmd_synth(const Common& common) {
  RunConfig cfg = resolve_config(common, nullptr);
  const fs::path out = make_out_dir(common.out);
  Manifest manifest("synth", to_json(cfg));
  if (!common.config.empty()) manifest.add_input(common.config);
  const World world = generate_world(cfg.world);
  save_world(out, world);
  write_text(out / "config.json", to_json(cfg).dump(2) + "\n");
  manifest.write(out);
  std::cerr << "synth: " << world.catalog.size() << " items, " << world.pairs.size() << " pairs -> "
            << out.string() << "\n";
  return 0;
}

int cmd_train(const Common& common, const std::string& data) {
  if (data.empty()) throw ConfigError("--data is required");
  RunConfig cfg = resolve_config(common, nullptr);
  const LoadedWorld world = load_world(data);
  cfg.world = world.config;
  const fs::path out = make_out_dir(common.out);
  Manifest manifest("train", to_json(cfg));
  if (!common.config.empty()) manifest.add_input(common.config);
  manifest.add_input(data);

  const Experiment ex = make_experiment(world, cfg);
  std::ofstream log(out / "train_log.jsonl");
  double window = 0.0;
  const long every = 100;
  const auto on_step = [&](long step, double loss) {
    window += loss;
    if ((step + 1) % every == 0 || step + 1 == cfg.train.total_steps) {
      const long n = (step % every) + 1;
      log << json{{"step", step + 1}, {"loss", window / double(n)}}.dump() << '\n';
      if ((step + 1) % 1000 == 0) std::cerr << "train: step " << step + 1 << " loss " << window / double(n) << "\n";
      window = 0.0;
    }
  };
  log_progress(cfg.kind == "diffusion" ? "train diffusion" : "train regression", cfg.train.total_steps);
  Checkpoint ckpt = cfg.kind == "diffusion" ? make_checkpoint(train_diffusion(cfg, ex, on_step))
                                            : make_checkpoint(train_regression(cfg, ex, on_step));
  ckpt.meta["run_config"] = to_json(cfg);
  save_checkpoint(out / "model.ckpt", ckpt);
  log.close();
  write_text(out / "config.json", to_json(cfg).dump(2) + "\n");
  manifest.write(out);
  std::cerr << "train: wrote " << (out / "model.ckpt").string() << "\n";
  return 0;
}

int cmd_sample(const Common& common, const SampleOptions& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  const LoadedModel model = load_model(opts.ckpt);
  RunConfig cfg = resolve_config(common, &model.ckpt);
  const LoadedWorld world = load_world(opts.data);
  cfg.world = world.config;
  const fs::path out = make_out_dir(common.out);

  if (model.regression && (opts.omega || !opts.steers.empty() || opts.slerp)) {
    throw ConfigError("--omega, --steer and --slerp need a diffusion checkpoint");
  }
  SamplerConfig sampler = cfg.sampler;
  if (opts.omega) sampler.omega = *opts.omega;
  if (opts.steps) sampler.steps = *opts.steps;
  if (opts.seed) sampler.seed = *opts.seed;
  json steer_log = json::array();
  for (const auto& s : opts.steers) {
    const auto [name, strength] = split_pair(s, "--steer");
    const ConceptProxy& p = find_concept(world.proxies, name);
    sampler.steers.push_back({p.text_vector_target, strength});
    steer_log.push_back({{"concept", p.id}, {"strength", strength}});
  }
  json slerp_log = nullptr;
  if (opts.slerp) {
    const auto [name, ratio] = split_pair(*opts.slerp, "--slerp");
    const ConceptProxy& p = find_concept(world.proxies, name);
    sampler.slerp = SlerpSteer{p.text_vector_target, ratio};
    slerp_log = {{"concept", p.id}, {"ratio", ratio}};
  }
  sampler.validate(cfg.world.target_dim);
  const int count = opts.n_per_query.value_or(cfg.eval.samples_per_query);
  if (count < 1) throw ConfigError("--n-per-query must be >= 1");

  const Experiment ex = make_experiment(world, cfg);
  PairedDataset pairs;
  if (opts.split == "eval") {
    pairs = ex.eval;
  } else if (opts.split == "train") {
    pairs = ex.train;
  } else if (opts.split == "all") {
    pairs = world.pairs;
  } else {
    throw ConfigError("--split must be eval, train or all");
  }
  if (opts.limit > 0 && opts.limit < pairs.size()) {
    std::vector<std::size_t> rows(opts.limit);
    std::iota(rows.begin(), rows.end(), 0);
    pairs = pairs.subset(rows);
  }

  Manifest manifest("sample", to_json(cfg));
  manifest.add_input(opts.ckpt);
  manifest.add_input(opts.data);
  const auto seeds = draw_seeds(model, sampler, pairs.queries, count);
  EmbeddingSet dump;
  dump.vectors.resize(cfg.world.target_dim, static_cast<Eigen::Index>(pairs.size()) * count);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    for (int j = 0; j < count; ++j) {
      const auto col = static_cast<Eigen::Index>(q) * count + j;
      dump.vectors.col(col) = seeds[q].col(j).cast<float>();
      dump.ids.push_back(pairs.ids[q] + "#" + std::to_string(j));
      dump.extra.push_back({{"query_id", pairs.ids[q]}, {"sample", j}});
    }
  }
  save_embeddings(out / "samples.emb1", dump);
  json sampler_json = sampler;
  sampler_json["steers"] = steer_log;
  sampler_json["slerp"] = slerp_log;
  sampler_json["n_per_query"] = count;
  sampler_json["model_kind"] = model.ckpt.kind;
  write_text(out / "sampler.json", sampler_json.dump(2) + "\n");
  manifest.write(out);
  std::cerr << "sample: " << pairs.size() << " queries x " << count << " -> " << (out / "samples.emb1").string()
            << "\n";
  return 0;
}

int cmd_eval(const Common& common, const EvalOptionsCli& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  if (opts.ckpt.empty() == opts.samples.empty()) throw ConfigError("give exactly one of --ckpt and --samples");
  std::optional<LoadedModel> model;
  if (!opts.ckpt.empty()) model = load_model(opts.ckpt);
  RunConfig cfg = resolve_config(common, model ? &model->ckpt : nullptr);
  if (!opts.k_list.empty()) cfg.eval.recall_k = opts.k_list;
  cfg.validate();
  const LoadedWorld world = load_world(opts.data);
  cfg.world = world.config;
  const fs::path out = make_out_dir(common.out);
  Manifest manifest("eval", to_json(cfg));
  manifest.add_input(opts.data);

  const Experiment ex = make_experiment(world, cfg);
  const Index index(ex.catalog);
  const EvalSetup setup = EvalSetup::make(ex.catalog, index, ex.proxies);
  EvalOptions eo;
  eo.recall_k = cfg.eval.recall_k;
  eo.entropy_k = cfg.eval.entropy_k;
  eo.seed = cfg.eval.seed;

  MetricsReport report;
  if (model) {
    manifest.add_input(opts.ckpt);
    const auto seeds = draw_seeds(*model, cfg.sampler, ex.eval.queries, cfg.eval.samples_per_query);
    report = evaluate_seeds(setup, ex.eval, seeds, eo);
    report.model_kind = model->ckpt.kind;
    if (model->diffusion) report.omega = cfg.sampler.omega;
  } else {
    manifest.add_input(opts.samples);
    const EmbeddingSet set = load_embeddings(opts.samples, cfg.world.target_dim);
    std::vector<std::string> order;
    std::map<std::string, std::vector<Eigen::Index>> cols;
    for (std::size_t i = 0; i < set.ids.size(); ++i) {
      if (i >= set.extra.size() || !set.extra[i].contains("query_id")) {
        throw DataError("samples: sidecar row without query_id");
      }
      const auto qid = set.extra[i].at("query_id").get<std::string>();
      if (!cols.count(qid)) order.push_back(qid);
      cols[qid].push_back(static_cast<Eigen::Index>(i));
    }
    if (order.empty()) throw DataError("samples: empty dump");
    const PairedDataset pairs = pairs_by_id(world.pairs, order);
    std::vector<MatrixXd> seeds;
    for (const auto& qid : order) {
      const auto& c = cols.at(qid);
      MatrixXd s(set.vectors.rows(), static_cast<Eigen::Index>(c.size()));
      for (std::size_t j = 0; j < c.size(); ++j) s.col(Eigen::Index(j)) = set.vectors.col(c[j]).cast<double>();
      seeds.push_back(std::move(s));
    }
    report = evaluate_seeds(setup, pairs, seeds, eo);
    report.model_kind = "samples";
  }
  const std::string text = to_json(report).dump(2) + "\n";
  write_text(out / "metrics.json", text);
  manifest.write(out);
  std::cout << text;
  return 0;
}

int cmd_sweep(const Common& common, const SweepOptions& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  const LoadedModel model = load_model(opts.ckpt);
  if (!model.diffusion) throw ConfigError("sweep needs a diffusion checkpoint");
  RunConfig cfg = resolve_config(common, &model.ckpt);
  if (!opts.omegas.empty()) cfg.eval.omegas = opts.omegas;
  cfg.validate();
  if (opts.jobs < 1) throw ConfigError("--jobs must be >= 1");
  const LoadedWorld world = load_world(opts.data);
  cfg.world = world.config;
  const fs::path out = make_out_dir(common.out);
  Manifest manifest("sweep", to_json(cfg));
  manifest.add_input(opts.ckpt);
  manifest.add_input(opts.data);

  const Experiment ex = make_experiment(world, cfg);
  const Index index(ex.catalog);
  const EvalSetup setup = EvalSetup::make(ex.catalog, index, ex.proxies);
  EvalOptions eo;
  eo.recall_k = cfg.eval.recall_k;
  eo.entropy_k = cfg.eval.entropy_k;
  eo.seed = cfg.eval.seed;
  const NetworkDenoiser denoiser(*model.diffusion);

  // Same sampler seed at every point.
  const std::size_t n = cfg.eval.omegas.size();
  std::vector<MetricsReport> reports(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        SamplerConfig s = cfg.sampler;
        s.omega = cfg.eval.omegas[i];
        const auto seeds = diffusion_seeds(denoiser, model.diffusion->schedule, s, ex.eval.queries,
                                           cfg.eval.samples_per_query);
        reports[i] = evaluate_seeds(setup, ex.eval, seeds, eo);
        reports[i].model_kind = "diffusion";
        reports[i].omega = s.omega;
        std::cerr << "sweep: omega " << format_omega(s.omega) << " done\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<int>(opts.jobs, int(n)); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  json rows = json::array();
  std::ostringstream table;
  table << "omega\tR@10\tTA\tMISCS\tH@10\tH@20\tH@50\n";
  auto cell = [](const std::map<int, double>& m, int k) {
    const auto it = m.find(k);
    char buf[32];
    if (it == m.end()) return std::string("-");
    std::snprintf(buf, sizeof buf, "%.4f", it->second);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = reports[i];
    const json j = to_json(r);
    write_text(out / ("omega_" + format_omega(*r.omega) + ".json"), j.dump(2) + "\n");
    rows.push_back(j);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s\t%s\t%.4f\t%.4f\t", format_omega(*r.omega).c_str(),
                  cell(r.recall_at, 10).c_str(), r.triplet_accuracy, r.miscs);
    table << buf << cell(r.entropy_at, 10) << '\t' << cell(r.entropy_at, 20) << '\t' << cell(r.entropy_at, 50)
          << '\n';
  }
  write_text(out / "sweep.json", json{{"v", 1}, {"rows", rows}}.dump(2) + "\n");
  write_text(out / "sweep.tsv", table.str());
  manifest.write(out);
  std::cout << table.str();
  return 0;
}

int cmd_serve(const Common& common, const ServeOptions& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  LoadedModel model = load_model(opts.ckpt);
  RunConfig cfg = resolve_config(common, &model.ckpt);
  const LoadedWorld world = load_world(opts.data);
  cfg.world = world.config;
  const Experiment ex = make_experiment(world, cfg);
  ServiceData data;
  data.diffusion = model.diffusion;
  data.regression = model.regression;
  data.catalog = ex.catalog;
  data.proxies = ex.proxies;
  data.queries = ex.eval;
  data.sampler = cfg.sampler;
  Service service(std::move(data));
  std::cerr << "serve: listening on http://" << opts.host << ":" << opts.port << "\n";
  service.serve(opts.host, opts.port, opts.ui);
  return 0;
}

}  // namespace seedgen::cli
