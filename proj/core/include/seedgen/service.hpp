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

// HTTP facade over sampling and retrieval. Request handling is exposed
// directly (get/post) so it can be driven without a socket; serve() binds
// the same handlers to an HTTP/1.1 listener.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "seedgen/diffusion.hpp"
#include "seedgen/regression.hpp"
#include "seedgen/retrieval.hpp"
#include "seedgen/world.hpp"

namespace seedgen {

inline constexpr int kDefaultPort = 8787;

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

struct ServiceData {
  std::optional<DenoiserModel> diffusion;
  std::optional<RegressionModel> regression;
  Catalog catalog;
  std::vector<ConceptProxy> proxies;
  PairedDataset queries;     // served by /queries, addressable by query_id
  SamplerConfig sampler;     // defaults for /sample
};

// Top-2 principal directions of the catalog.
struct Projection {
  Eigen::VectorXd mean;
  Eigen::Matrix<double, 2, Eigen::Dynamic> basis;
  Eigen::Vector2d variance;

  Eigen::Vector2d apply(const Eigen::VectorXd& v) const { return basis * (v - mean); }
};

Projection catalog_projection(const Eigen::MatrixXd& embeddings);

class Service {
 public:
  // Throws ConfigError unless exactly one model is present.
  explicit Service(ServiceData data);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ServiceResponse get(const std::string& path, const std::map<std::string, std::string>& params) const;
  ServiceResponse post(const std::string& path, const std::string& body) const;

  // Blocks until stop(). Static files under `ui_dir` are served at /ui when
  // the directory is given.
  void serve(const std::string& host, int port, const std::string& ui_dir = {});
  // Binds to an ephemeral port and returns it; pair with serve_bound().
  int bind_any_port(const std::string& host);
  void serve_bound();
  void stop();

  const Projection& projection() const { return projection_; }

 private:
  ServiceResponse health() const;
  ServiceResponse catalog(const std::map<std::string, std::string>& params) const;
  ServiceResponse concepts() const;
  ServiceResponse queries(const std::map<std::string, std::string>& params) const;
  ServiceResponse projection_body() const;
  ServiceResponse sample(const std::string& body) const;
  void install_routes(const std::string& ui_dir);

  ServiceData data_;
  Index index_;
  Projection projection_;
  std::unique_ptr<NetworkDenoiser> denoiser_;
  int num_genres_ = 0;

  struct Http;
  std::unique_ptr<Http> http_;
};

}  // namespace seedgen
