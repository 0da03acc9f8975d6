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

#include "seedgen/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_map>

#include "seedgen/emb_io.hpp"
#include "seedgen/errors.hpp"
#include "seedgen/rng.hpp"

namespace seedgen {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void WorldConfig::validate() const {
  if (target_dim < 2 || query_dim < 2) throw ConfigError("world: dims must be >= 2");
  if (num_genres < 2) throw ConfigError("world: need at least 2 genres");
  if (items_per_genre < 1) throw ConfigError("world: items_per_genre must be >= 1");
  if (!(cluster_concentration > 0.0)) throw ConfigError("world: cluster_concentration must be > 0");
  if (query_noise < 0.0) throw ConfigError("world: query_noise must be >= 0");
  if (ambiguity < 1 || ambiguity > num_genres) throw ConfigError("world: ambiguity must lie in [1, L]");
  if (!(mixture_concentration >= 0.0)) throw ConfigError("world: mixture_concentration must be >= 0");
  if (queries_per_item < 1) throw ConfigError("world: queries_per_item must be >= 1");
}

void to_json(nlohmann::json& j, const WorldConfig& c) {
  j = {{"target_dim", c.target_dim},
       {"query_dim", c.query_dim},
       {"num_genres", c.num_genres},
       {"items_per_genre", c.items_per_genre},
       {"cluster_concentration", c.cluster_concentration},
       {"query_noise", c.query_noise},
       {"ambiguity", c.ambiguity},
       {"mixture_concentration", c.mixture_concentration},
       {"queries_per_item", c.queries_per_item},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, WorldConfig& c) {
  c.target_dim = j.value("target_dim", c.target_dim);
  c.query_dim = j.value("query_dim", c.query_dim);
  c.num_genres = j.value("num_genres", c.num_genres);
  c.items_per_genre = j.value("items_per_genre", c.items_per_genre);
  c.cluster_concentration = j.value("cluster_concentration", c.cluster_concentration);
  c.query_noise = j.value("query_noise", c.query_noise);
  c.ambiguity = j.value("ambiguity", c.ambiguity);
  c.mixture_concentration = j.value("mixture_concentration", c.mixture_concentration);
  c.queries_per_item = j.value("queries_per_item", c.queries_per_item);
  c.seed = j.value("seed", c.seed);
}

std::size_t Catalog::index_of(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw DataError("unknown catalog id '" + id + "'");
  return static_cast<std::size_t>(it - ids.begin());
}

PairedDataset PairedDataset::subset(const std::vector<std::size_t>& rows) const {
  PairedDataset out;
  out.queries.resize(queries.rows(), static_cast<Eigen::Index>(rows.size()));
  const bool latents = !supports.empty();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    out.ids.push_back(ids[r]);
    out.queries.col(static_cast<Eigen::Index>(i)) = queries.col(static_cast<Eigen::Index>(r));
    out.target_ids.push_back(target_ids[r]);
    out.target_index.push_back(target_index[r]);
    out.genres.push_back(genres[r]);
    if (latents) {
      out.supports.push_back(supports[r]);
      out.weights.push_back(weights[r]);
      out.styles.push_back(styles[r]);
    }
  }
  return out;
}

namespace {

std::string format_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", prefix, i);
  return buf;
}

}  // namespace

namespace {

VectorXd clean_query_raw(const WorldLatents& latents, const std::vector<int>& support,
                         const std::vector<double>& weights, int style) {
  if (weights.size() != support.size()) throw ConfigError("clean_query: one weight per support genre");
  VectorXd mix = VectorXd::Zero(latents.query_genre_map.cols());
  for (std::size_t i = 0; i < support.size(); ++i) mix(support[i]) = weights[i];
  return latents.query_genre_map * mix + latents.query_style_map * latents.styles.col(style);
}

// Symmetric Dirichlet draw via normalized gammas.
std::vector<double> dirichlet(Rng& rng, std::size_t n, double alpha) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& v : w) total += (v = gamma(rng.engine()));
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

VectorXd clean_query(const WorldLatents& latents, const std::vector<int>& support,
                     const std::vector<double>& weights, int style) {
  const VectorXd q = clean_query_raw(latents, support, weights, style);
  return q / q.norm();
}

World generate_world(const WorldConfig& cfg) {
  cfg.validate();
  World w;
  w.config = cfg;
  const int d = cfg.target_dim;
  const int qd = cfg.query_dim;
  const int L = cfg.num_genres;
  const int m = cfg.items_per_genre;
  WorldLatents& lat = w.latents;

  Rng centroid_rng(derive_seed(cfg.seed, 10));
  lat.centroids = centroid_rng.normal_matrix(d, L);
  lat.centroids.colwise().normalize();

  Rng map_rng(derive_seed(cfg.seed, 11));
  for (int g = 0; g < L; ++g) lat.genre_maps.push_back(map_rng.normal_matrix(d, d) / std::sqrt(double(d)));

  Rng style_rng(derive_seed(cfg.seed, 12));
  lat.styles = style_rng.normal_matrix(d, m) / std::sqrt(double(d));

  Rng query_map_rng(derive_seed(cfg.seed, 13));
  lat.query_genre_map = query_map_rng.normal_matrix(qd, L) / std::sqrt(double(qd));
  lat.query_style_map = query_map_rng.normal_matrix(qd, d) / std::sqrt(double(qd));

  Catalog& cat = w.catalog;
  cat.embeddings.resize(d, L * m);
  for (int g = 0; g < L; ++g) {
    for (int j = 0; j < m; ++j) {
      const int idx = g * m + j;
      VectorXd v = lat.centroids.col(g) + lat.genre_maps[g] * lat.styles.col(j) / cfg.cluster_concentration;
      cat.embeddings.col(idx) = v / v.norm();
      cat.ids.push_back(format_id("item", std::size_t(idx)));
      cat.genres.push_back(g);
    }
  }

  for (int g = 0; g < L; ++g) {
    ConceptProxy p;
    p.genre = g;
    p.id = "genre-" + std::to_string(g);
    p.text_vector_target = lat.centroids.col(g);
    p.text_vector_query = lat.query_genre_map.col(g).normalized();
    w.proxies.push_back(std::move(p));
  }

  PairedDataset& pairs = w.pairs;
  const std::size_t n_pairs = std::size_t(L) * m * cfg.queries_per_item;
  pairs.queries.resize(qd, static_cast<Eigen::Index>(n_pairs));
  Rng pair_rng(derive_seed(cfg.seed, 14));
  std::vector<int> others;
  std::size_t row = 0;
  for (int idx = 0; idx < L * m; ++idx) {
    const int g = idx / m;
    const int j = idx % m;
    for (int r = 0; r < cfg.queries_per_item; ++r, ++row) {
      others.clear();
      for (int h = 0; h < L; ++h) {
        if (h != g) others.push_back(h);
      }
      // Graded weights use a rejection step: keep (support, weights) with
      // probability w_g, so p(genre | query) = w_genre.
      std::vector<int> support;
      std::vector<double> weights;
      for (;;) {
        others.clear();
        for (int h = 0; h < L; ++h) {
          if (h != g) others.push_back(h);
        }
        support.assign(1, g);
        for (int k = 0; k + 1 < cfg.ambiguity; ++k) {
          const auto pick = k + static_cast<int>(pair_rng.below(others.size() - std::size_t(k)));
          std::swap(others[std::size_t(k)], others[std::size_t(pick)]);
          support.push_back(others[std::size_t(k)]);
        }
        std::sort(support.begin(), support.end());
        if (cfg.mixture_concentration == 0.0) {
          weights.assign(support.size(), 1.0 / double(support.size()));
          break;
        }
        weights = dirichlet(pair_rng, support.size(), cfg.mixture_concentration);
        const auto self = std::find(support.begin(), support.end(), g) - support.begin();
        if (pair_rng.uniform() < weights[std::size_t(self)]) break;
      }
      VectorXd q = clean_query_raw(lat, support, weights, j);
      const VectorXd noise = pair_rng.normal_matrix(qd, 1) / std::sqrt(double(qd));
      q += cfg.query_noise * noise;
      pairs.queries.col(static_cast<Eigen::Index>(row)) = q / q.norm();
      pairs.ids.push_back(format_id("query", row));
      pairs.target_ids.push_back(cat.ids[std::size_t(idx)]);
      pairs.target_index.push_back(std::size_t(idx));
      pairs.genres.push_back(g);
      pairs.weights.push_back(std::move(weights));
      pairs.supports.push_back(std::move(support));
      pairs.styles.push_back(j);
    }
  }
  return w;
}

MatrixXd target_matrix(const Catalog& catalog, const PairedDataset& pairs) {
  MatrixXd out(catalog.embeddings.rows(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs.target_index[i] >= catalog.size()) throw DataError("pairs: target index out of range");
    out.col(static_cast<Eigen::Index>(i)) = catalog.embeddings.col(static_cast<Eigen::Index>(pairs.target_index[i]));
  }
  return out;
}

std::pair<PairedDataset, PairedDataset> split(const PairedDataset& dataset, double eval_fraction,
                                              std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw ConfigError("split: eval_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_genre;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int g = dataset.genres[i];
    if (g < 0) throw DataError("split: pair without genre");
    if (std::size_t(g) >= by_genre.size()) by_genre.resize(std::size_t(g) + 1);
    by_genre[std::size_t(g)].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> train, eval;
  for (auto& rows : by_genre) {
    for (std::size_t k = rows.size(); k > 1; --k) {
      std::swap(rows[k - 1], rows[std::size_t(rng.below(k))]);
    }
    const auto n_eval = static_cast<std::size_t>(std::llround(eval_fraction * double(rows.size())));
    eval.insert(eval.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_eval));
    train.insert(train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_eval), rows.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(eval.begin(), eval.end());
  return {dataset.subset(train), dataset.subset(eval)};
}

void save_world(const std::filesystem::path& dir, const World& world) {
  std::filesystem::create_directories(dir);
  {
    EmbeddingSet cat{world.catalog.embeddings.cast<float>(), world.catalog.ids, world.catalog.genres, {}};
    save_embeddings(dir / "catalog.emb1", cat);
  }
  {
    EmbeddingSet pairs{world.pairs.queries.cast<float>(), world.pairs.ids, world.pairs.genres, {}};
    for (const auto& t : world.pairs.target_ids) pairs.extra.push_back({{"target_id", t}});
    save_embeddings(dir / "pairs.emb1", pairs);
  }
  EmbeddingSet pt, pq;
  pt.vectors.resize(world.config.target_dim, static_cast<Eigen::Index>(world.proxies.size()));
  pq.vectors.resize(world.config.query_dim, static_cast<Eigen::Index>(world.proxies.size()));
  for (std::size_t i = 0; i < world.proxies.size(); ++i) {
    const auto& p = world.proxies[i];
    pt.vectors.col(static_cast<Eigen::Index>(i)) = p.text_vector_target.cast<float>();
    pq.vectors.col(static_cast<Eigen::Index>(i)) = p.text_vector_query.cast<float>();
    pt.ids.push_back(p.id);
    pq.ids.push_back(p.id);
    pt.genres.push_back(p.genre);
    pq.genres.push_back(p.genre);
  }
  save_embeddings(dir / "proxies_target.emb1", pt);
  save_embeddings(dir / "proxies_query.emb1", pq);
  std::ofstream cfg(dir / "world.json");
  cfg << nlohmann::json(world.config).dump(2) << '\n';
}

LoadedWorld load_world(const std::filesystem::path& dir) {
  LoadedWorld w;
  {
    std::ifstream in(dir / "world.json");
    if (!in) throw DataError("missing " + (dir / "world.json").string());
    try {
      w.config = nlohmann::json::parse(in).get<WorldConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError("world.json: " + std::string(e.what()));
    }
  }
  const auto cat = load_embeddings(dir / "catalog.emb1", w.config.target_dim);
  if (cat.genres.size() != cat.ids.size()) throw DataError("catalog: every row needs a genre");
  w.catalog.ids = cat.ids;
  w.catalog.genres = cat.genres;
  w.catalog.embeddings = cat.vectors.cast<double>();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < w.catalog.ids.size(); ++i) {
    if (!index.emplace(w.catalog.ids[i], i).second) throw DataError("catalog: duplicate id " + w.catalog.ids[i]);
    const double n = w.catalog.embeddings.col(static_cast<Eigen::Index>(i)).norm();
    if (std::abs(n - 1.0) > 1e-5) throw DataError("catalog: item " + w.catalog.ids[i] + " is not unit-norm");
  }

  const auto pairs = load_embeddings(dir / "pairs.emb1", w.config.query_dim);
  if (pairs.extra.size() != pairs.ids.size()) throw DataError("pairs: sidecar rows need target_id");
  w.pairs.ids = pairs.ids;
  w.pairs.queries = pairs.vectors.cast<double>();
  w.pairs.genres = pairs.genres;
  for (std::size_t i = 0; i < pairs.ids.size(); ++i) {
    const auto& row = pairs.extra[i];
    if (!row.contains("target_id")) throw DataError("pairs: row without target_id");
    const auto t = row.at("target_id").get<std::string>();
    const auto it = index.find(t);
    if (it == index.end()) throw DataError("pairs: target_id '" + t + "' not in catalog");
    w.pairs.target_ids.push_back(t);
    w.pairs.target_index.push_back(it->second);
  }
  if (w.pairs.genres.size() != w.pairs.ids.size()) throw DataError("pairs: every row needs a genre");

  const auto pt = load_embeddings(dir / "proxies_target.emb1", w.config.target_dim);
  const auto pq = load_embeddings(dir / "proxies_query.emb1", w.config.query_dim);
  if (pt.ids != pq.ids || pt.genres.size() != pt.ids.size()) throw DataError("proxies: target/query files disagree");
  for (std::size_t i = 0; i < pt.ids.size(); ++i) {
    ConceptProxy p;
    p.id = pt.ids[i];
    p.genre = pt.genres[i];
    p.text_vector_target = pt.vectors.col(static_cast<Eigen::Index>(i)).cast<double>();
    p.text_vector_query = pq.vectors.col(static_cast<Eigen::Index>(i)).cast<double>();
    w.proxies.push_back(std::move(p));
  }
  return w;
}

}  // namespace seedgen
