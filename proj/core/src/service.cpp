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

#include "seedgen/service.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <random>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "seedgen/errors.hpp"
#include "seedgen/evaluation.hpp"
#include "seedgen/metrics.hpp"

namespace seedgen {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

// A request failure with its HTTP status.
struct HttpError {
  int status;
  std::string message;
  long step = -1;
};

ServiceResponse reply(const json& body, int status = 200) {
  json b = body;
  b["v"] = 1;
  return {status, b.dump()};
}

ServiceResponse error_reply(const HttpError& e) {
  json b = {{"error", e.message}};
  if (e.step >= 0) b["step"] = e.step;
  return reply(b, e.status);
}

long param_int(const std::map<std::string, std::string>& params, const std::string& name, long fallback,
               long lo, long hi) {
  const auto it = params.find(name);
  if (it == params.end()) return fallback;
  long v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw HttpError{400, "parameter '" + name + "' is not an integer"};
  }
  if (v < lo || v > hi) {
    throw HttpError{400, "parameter '" + name + "' must lie in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]"};
  }
  return v;
}

json vector_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from(const json& j, Eigen::Index dim, const std::string& what) {
  if (!j.is_array()) throw HttpError{400, what + " must be an array of numbers"};
  if (static_cast<Eigen::Index>(j.size()) != dim) {
    throw HttpError{422, what + " has dimension " + std::to_string(j.size()) + ", expected " +
                             std::to_string(dim)};
  }
  VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!j[std::size_t(i)].is_number()) throw HttpError{400, what + " must be an array of numbers"};
    v(i) = j[std::size_t(i)].get<double>();
    if (!std::isfinite(v(i))) throw HttpError{400, what + " has a non-finite entry"};
  }
  return v;
}

template <typename T>
T field(const json& body, const char* name, T fallback) {
  if (!body.contains(name) || body.at(name).is_null()) return fallback;
  try {
    return body.at(name).get<T>();
  } catch (const json::exception&) {
    throw HttpError{400, std::string("field '") + name + "' has the wrong type"};
  }
}

}  // namespace

Projection catalog_projection(const MatrixXd& embeddings) {
  if (embeddings.rows() < 2 || embeddings.cols() < 2) {
    throw ConfigError("projection: need at least 2 dimensions and 2 items");
  }
  const GaussianMoments m = moments(embeddings);
  const SymmetricEigen eig = symmetric_eigen(m.covariance);
  Projection p;
  p.mean = m.mean;
  p.basis.resize(2, embeddings.rows());
  const Eigen::Index n = eig.values.size();
  for (int r = 0; r < 2; ++r) {
    VectorXd u = eig.vectors.col(n - 1 - r);
    Eigen::Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u(at) < 0) u = -u;  // fixed sign so every run plots alike
    p.basis.row(r) = u.transpose();
    p.variance(r) = eig.values(n - 1 - r);
  }
  return p;
}

struct Service::Http {
  httplib::Server server;
};

Service::Service(ServiceData data)
    : data_(std::move(data)), index_(data_.catalog), projection_(catalog_projection(data_.catalog.embeddings)) {
  if (data_.diffusion.has_value() == data_.regression.has_value()) {
    throw ConfigError("service: exactly one of the diffusion and regression models is required");
  }
  if (data_.diffusion) denoiser_ = std::make_unique<NetworkDenoiser>(*data_.diffusion);
  const auto& spec = data_.diffusion ? data_.diffusion->params.spec : data_.regression->params.spec;
  if (spec.output_dim != index_.dim()) throw ConfigError("service: model and catalog dimensions differ");
  if (data_.queries.size() > 0 && data_.queries.queries.rows() != spec.cond_dim) {
    throw ConfigError("service: model and query dimensions differ");
  }
  for (int g : data_.catalog.genres) num_genres_ = std::max(num_genres_, g + 1);
  for (const auto& p : data_.proxies) num_genres_ = std::max(num_genres_, p.genre + 1);
}

Service::~Service() = default;

ServiceResponse Service::get(const std::string& path, const std::map<std::string, std::string>& params) const {
  try {
    if (path == "/health") return health();
    if (path == "/catalog") return catalog(params);
    if (path == "/concepts") return concepts();
    if (path == "/queries") return queries(params);
    if (path == "/projection") return projection_body();
    return error_reply({404, "no route " + path});
  } catch (const HttpError& e) {
    return error_reply(e);
  }
}

ServiceResponse Service::post(const std::string& path, const std::string& body) const {
  if (path != "/sample") return error_reply({404, "no route " + path});
  try {
    return sample(body);
  } catch (const HttpError& e) {
    return error_reply(e);
  } catch (const NumericError& e) {
    return error_reply({500, e.what(), e.step()});
  } catch (const ConfigError& e) {
    return error_reply({400, e.what()});
  } catch (const DataError& e) {
    return error_reply({422, e.what()});
  }
}

ServiceResponse Service::health() const {
  return reply({{"status", "ok"},
                {"model_kind", data_.diffusion ? "diffusion" : "regression"},
                {"catalog_size", data_.catalog.size()}});
}

ServiceResponse Service::catalog(const std::map<std::string, std::string>& params) const {
  const auto n = static_cast<long>(data_.catalog.size());
  const long offset = param_int(params, "offset", 0, 0, n);
  const long limit = param_int(params, "limit", 100, 1, 1000);
  json items = json::array();
  for (long i = offset; i < std::min(n, offset + limit); ++i) {
    const Eigen::Vector2d xy = projection_.apply(data_.catalog.embeddings.col(i));
    items.push_back({{"id", data_.catalog.ids[std::size_t(i)]},
                     {"genre", data_.catalog.genres[std::size_t(i)]},
                     {"xy", {xy(0), xy(1)}}});
  }
  return reply({{"total", n}, {"offset", offset}, {"items", items}});
}

ServiceResponse Service::concepts() const {
  json items = json::array();
  for (const auto& p : data_.proxies) {
    items.push_back({{"id", p.id}, {"label", "Genre " + std::to_string(p.genre)}, {"genre", p.genre}});
  }
  return reply({{"concepts", items}});
}

ServiceResponse Service::queries(const std::map<std::string, std::string>& params) const {
  const long limit = param_int(params, "limit", 20, 1, 10000);
  json items = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(std::size_t(limit), data_.queries.size()); ++i) {
    items.push_back({{"id", data_.queries.ids[i]}, {"genre_hint", data_.queries.genres[i]}});
  }
  return reply({{"queries", items}});
}

ServiceResponse Service::projection_body() const {
  return reply({{"mean", vector_json(projection_.mean)},
                {"basis", {vector_json(projection_.basis.row(0).transpose()),
                           vector_json(projection_.basis.row(1).transpose())}},
                {"variance", {projection_.variance(0), projection_.variance(1)}}});
}

ServiceResponse Service::sample(const std::string& body_text) const {
  const auto started = std::chrono::steady_clock::now();
  const json body = json::parse(body_text, nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw HttpError{400, "body must be a JSON object"};

  const int dim = index_.dim();
  const auto& spec = data_.diffusion ? data_.diffusion->params.spec : data_.regression->params.spec;

  const int n_samples = field<int>(body, "n_samples", 16);
  const int k = field<int>(body, "k", 50);
  if (n_samples < 1 || n_samples > 256) throw HttpError{400, "n_samples must lie in [1, 256]"};
  if (k < 1 || k > 1000) throw HttpError{400, "k must lie in [1, 1000]"};

  VectorXd cond;
  if (field<bool>(body, "unconditional", false)) {
    cond = VectorXd::Zero(spec.cond_dim);
  } else if (body.contains("query_id")) {
    const auto id = field<std::string>(body, "query_id", "");
    const auto& ids = data_.queries.ids;
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw HttpError{404, "unknown query_id '" + id + "'"};
    cond = data_.queries.queries.col(it - ids.begin());
  } else if (body.contains("query")) {
    cond = vector_from(body.at("query"), spec.cond_dim, "query");
  } else {
    throw HttpError{400, "one of query_id, query or unconditional is required"};
  }

  auto concept_vector = [&](const json& entry, const std::string& what) -> VectorXd {
    if (entry.contains("concept_id")) {
      const auto id = field<std::string>(entry, "concept_id", "");
      for (const auto& p : data_.proxies) {
        if (p.id == id) return p.text_vector_target;
      }
      throw HttpError{404, "unknown concept_id '" + id + "'"};
    }
    if (entry.contains("vector")) {
      VectorXd v = vector_from(entry.at("vector"), dim, what + ".vector");
      const double norm = v.norm();
      if (!(norm > 0.0)) throw HttpError{400, what + ".vector must be nonzero"};
      return v / norm;
    }
    throw HttpError{400, what + " needs concept_id or vector"};
  };

  SamplerConfig cfg = data_.sampler;
  cfg.omega = field<double>(body, "omega", cfg.omega);
  cfg.steps = field<int>(body, "steps", cfg.steps);
  if (body.contains("steers") && !body.at("steers").is_null()) {
    if (!body.at("steers").is_array()) throw HttpError{400, "steers must be an array"};
    for (const auto& s : body.at("steers")) {
      if (!s.is_object() || !s.contains("strength")) throw HttpError{400, "each steer needs a strength"};
      cfg.steers.push_back({concept_vector(s, "steer"), field<double>(s, "strength", 0.0)});
    }
  }
  if (body.contains("slerp") && !body.at("slerp").is_null()) {
    const json& s = body.at("slerp");
    if (!s.is_object()) throw HttpError{400, "slerp must be an object"};
    cfg.slerp = SlerpSteer{concept_vector(s, "slerp"), field<double>(s, "ratio", 0.55)};
  }

  std::uint64_t seed = 0;
  if (body.contains("seed") && !body.at("seed").is_null()) {
    if (!body.at("seed").is_number_unsigned()) throw HttpError{400, "seed must be a non-negative integer"};
    seed = body.at("seed").get<std::uint64_t>();
  } else {
    // Kept below 2^53 so JSON clients can echo it back exactly.
    std::random_device rd;
    seed = ((std::uint64_t(rd()) << 32) | rd()) & ((std::uint64_t(1) << 53) - 1);
  }
  cfg.seed = seed;
  cfg.validate(dim);

  MatrixXd seeds;
  if (denoiser_) {
    seeds = seedgen::sample(*denoiser_, cond, data_.diffusion->schedule, cfg, n_samples);
  } else {
    seeds = predict(*data_.regression, cond, true).replicate(1, n_samples);
  }

  const int depth = std::min<int>(std::max(k, 50), int(index_.size()));
  const RankedList fused = fused_retrieval(index_, seeds, depth);
  json retrieved = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(std::size_t(k), fused.size()); ++i) {
    const auto& item = fused[i];
    retrieved.push_back({{"id", index_.id(item.index)}, {"genre", index_.genre(item.index)}, {"score", item.score}});
  }
  json entropy = json::object();
  for (int kk : {10, 20, 50}) {
    std::vector<int> genres;
    for (std::size_t i = 0; i < std::min<std::size_t>(std::size_t(kk), fused.size()); ++i) {
      genres.push_back(index_.genre(fused[i].index));
    }
    entropy[std::to_string(kk)] = entropy_at_k(genres, num_genres_);
  }

  const bool include_vectors = field<bool>(body, "include_vectors", false);
  json samples = json::array();
  for (Eigen::Index j = 0; j < seeds.cols(); ++j) {
    const Eigen::Vector2d xy = projection_.apply(seeds.col(j));
    json s = {{"xy", {xy(0), xy(1)}}};
    if (include_vectors) s["vector"] = vector_json(seeds.col(j));
    samples.push_back(std::move(s));
  }

  json out = {{"seed", seed},
              {"model_kind", denoiser_ ? "diffusion" : "regression"},
              {"omega", cfg.omega},
              {"samples", samples},
              {"retrieved", retrieved},
              {"diversity", {{"miscs", n_samples >= 2 ? json(miscs(seeds)) : json(nullptr)},
                             {"entropy_at", entropy}}}};
  // Wall time breaks byte-identical replays, so it is opt-in.
  if (field<bool>(body, "include_timing", false)) {
    out["timing_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return reply(out);
}

void Service::install_routes(const std::string& ui_dir) {
  http_ = std::make_unique<Http>();
  auto& srv = http_->server;
  auto params_of = [](const httplib::Request& req) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : req.params) out.emplace(k, v);
    return out;
  };
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  for (const char* route : {"/health", "/catalog", "/concepts", "/queries", "/projection"}) {
    srv.Get(route, [this, route, params_of, send](const httplib::Request& req, httplib::Response& res) {
      send(res, get(route, params_of(req)));
    });
  }
  srv.Post("/sample", [this, send](const httplib::Request& req, httplib::Response& res) {
    const auto started = std::chrono::steady_clock::now();
    send(res, post("/sample", req.body));
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    res.set_header("Server-Timing", "sample;dur=" + std::to_string(ms));
  });
  if (!ui_dir.empty() && !srv.set_mount_point("/ui", ui_dir)) {
    throw ConfigError("service: cannot serve ui directory '" + ui_dir + "'");
  }
}

void Service::serve(const std::string& host, int port, const std::string& ui_dir) {
  install_routes(ui_dir);
  if (!http_->server.listen(host, port)) {
    throw ConfigError("service: cannot listen on " + host + ":" + std::to_string(port));
  }
}

int Service::bind_any_port(const std::string& host) {
  install_routes({});
  const int port = http_->server.bind_to_any_port(host);
  if (port < 0) throw ConfigError("service: cannot bind " + host);
  return port;
}

void Service::serve_bound() { http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_) http_->server.stop();
}

}  // namespace seedgen
