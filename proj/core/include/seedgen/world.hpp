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

// Synthetic joint-embedding world.
//
// Targets: L genre centroids on the unit sphere. Every genre renders the same
// set of latent "styles" through its own random linear map, so catalog item
// (g, j) = normalize(c_g + R_g s_j / concentration).
//
// Queries: a fixed random linear map of a genre mixture (uniform weight on a
// support of `ambiguity` genres that contains the paired genre) plus a map of
// the style, plus isotropic noise, normalized. With ambiguity > 1 one query
// is equally compatible with item (h, j) for every h in its support.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace seedgen {

struct WorldConfig {
  int target_dim = 16;
  int query_dim = 32;
  int num_genres = 8;
  int items_per_genre = 250;
  double cluster_concentration = 2.0;
  double query_noise = 0.05;
  int ambiguity = 3;
  // Dirichlet concentration of the genre weights inside a query's support;
  // 0 gives equal weights.
  double mixture_concentration = 0.0;
  int queries_per_item = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const WorldConfig& c);
void from_json(const nlohmann::json& j, WorldConfig& c);

struct Catalog {
  std::vector<std::string> ids;
  Eigen::MatrixXd embeddings;  // target_dim x n, unit-norm columns
  std::vector<int> genres;

  std::size_t size() const { return ids.size(); }
  // Throws DataError for unknown ids.
  std::size_t index_of(const std::string& id) const;
};

struct ConceptProxy {
  int genre = 0;
  std::string id;
  Eigen::VectorXd text_vector_target;
  Eigen::VectorXd text_vector_query;
};

struct PairedDataset {
  std::vector<std::string> ids;
  Eigen::MatrixXd queries;  // query_dim x n
  std::vector<std::string> target_ids;
  std::vector<std::size_t> target_index;  // column in the catalog
  std::vector<int> genres;
  // Construction latents; empty after loading from disk.
  std::vector<std::vector<int>> supports;
  std::vector<std::vector<double>> weights;  // per support genre, sums to 1
  std::vector<int> styles;

  std::size_t size() const { return ids.size(); }
  PairedDataset subset(const std::vector<std::size_t>& rows) const;
};

// Fixed maps behind one world, kept so tests can reconstruct queries.
struct WorldLatents {
  Eigen::MatrixXd centroids;                // target_dim x L
  std::vector<Eigen::MatrixXd> genre_maps;  // R_g, target_dim x target_dim
  Eigen::MatrixXd styles;                   // target_dim x items_per_genre
  Eigen::MatrixXd query_genre_map;          // query_dim x L
  Eigen::MatrixXd query_style_map;          // query_dim x target_dim
};

struct World {
  WorldConfig config;
  Catalog catalog;
  PairedDataset pairs;
  std::vector<ConceptProxy> proxies;
  WorldLatents latents;
};

World generate_world(const WorldConfig& cfg);

// Noise-free query for a weighted genre support and a style index.
Eigen::VectorXd clean_query(const WorldLatents& latents, const std::vector<int>& support,
                            const std::vector<double>& weights, int style);

// Catalog embedding of each pair's target, target_dim x pairs.
Eigen::MatrixXd target_matrix(const Catalog& catalog, const PairedDataset& pairs);

// Genre-stratified, seed-deterministic split. Returns (train, eval).
std::pair<PairedDataset, PairedDataset> split(const PairedDataset& dataset, double eval_fraction,
                                              std::uint64_t seed);

// On-disk layout of a world directory: catalog.emb1, pairs.emb1,
// proxies_target.emb1, proxies_query.emb1 (each with a .jsonl sidecar) and
// world.json holding the config.
void save_world(const std::filesystem::path& dir, const World& world);

struct LoadedWorld {
  WorldConfig config;
  Catalog catalog;
  PairedDataset pairs;
  std::vector<ConceptProxy> proxies;
};

LoadedWorld load_world(const std::filesystem::path& dir);

}  // namespace seedgen
