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

#include "seedgen/evaluation.hpp"

#include <algorithm>

#include "seedgen/errors.hpp"
#include "seedgen/rng.hpp"

namespace seedgen {

using Eigen::MatrixXd;

EvalSetup EvalSetup::make(const Catalog& catalog, const Index& index,
                          const std::vector<ConceptProxy>& proxies) {
  EvalSetup s;
  s.catalog = &catalog;
  s.index = &index;
  s.proxies = &proxies;
  s.reference = moments(catalog.embeddings);
  s.num_genres = 0;
  for (int g : catalog.genres) s.num_genres = std::max(s.num_genres, g + 1);
  for (const auto& p : proxies) s.num_genres = std::max(s.num_genres, p.genre + 1);
  return s;
}

std::vector<MatrixXd> diffusion_seeds(const Denoiser& model, const ScheduleConfig& schedule,
                                      const SamplerConfig& base, const MatrixXd& queries, int count,
                                      const SamplerHook& hook) {
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index q = 0; q < queries.cols(); ++q) {
    SamplerConfig cfg = base;
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(q));
    if (hook) hook(static_cast<std::size_t>(q), cfg);
    out.push_back(sample(model, queries.col(q), schedule, cfg, count));
  }
  return out;
}

std::vector<MatrixXd> regression_seeds(const RegressionModel& model, const MatrixXd& queries, int count) {
  const MatrixXd pred = predict(model, queries, true);
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(queries.cols()));
  for (Eigen::Index q = 0; q < queries.cols(); ++q) out.push_back(pred.col(q).replicate(1, count));
  return out;
}

RankedList fused_retrieval(const Index& index, const MatrixXd& seeds, int k) {
  const TopKResult per_seed = top_k(index, seeds, k);
  return fuse(index, per_seed.lists, k);
}

MetricsReport evaluate_seeds(const EvalSetup& setup, const PairedDataset& eval,
                             const std::vector<MatrixXd>& seeds, const EvalOptions& options) {
  if (seeds.size() != eval.size() || seeds.empty()) {
    throw ConfigError("evaluate: need one seed block per evaluation query");
  }
  const Catalog& cat = *setup.catalog;
  const Index& index = *setup.index;
  const auto per_query = static_cast<std::size_t>(seeds.front().cols());
  if (per_query < 2) throw ConfigError("evaluate: need at least 2 seeds per query");

  int depth = 1;
  for (int k : options.recall_k) depth = std::max(depth, k);
  for (int k : options.entropy_k) depth = std::max(depth, k);

  const Eigen::Index d = cat.embeddings.rows();
  const auto total = static_cast<Eigen::Index>(per_query * eval.size());
  MatrixXd pooled(d, total), truth(d, total), caption(d, total), negative(d, total);
  MatrixXd images(eval.queries.rows(), total);

  MatrixXd text_query(eval.queries.rows(), static_cast<Eigen::Index>(setup.proxies->size()));
  MatrixXd text_target(d, static_cast<Eigen::Index>(setup.proxies->size()));
  std::vector<const ConceptProxy*> proxy_of_genre(static_cast<std::size_t>(setup.num_genres), nullptr);
  for (std::size_t i = 0; i < setup.proxies->size(); ++i) {
    const auto& p = (*setup.proxies)[i];
    text_query.col(Eigen::Index(i)) = p.text_vector_query;
    text_target.col(Eigen::Index(i)) = p.text_vector_target;
    proxy_of_genre[std::size_t(p.genre)] = &p;
  }

  MetricsReport report;
  report.queries = eval.size();
  report.samples_per_query = per_query;
  std::map<int, double> recall_sum, entropy_sum;
  double miscs_sum = 0.0;
  std::size_t recall_count = 0;

  for (std::size_t q = 0; q < eval.size(); ++q) {
    const MatrixXd& s = seeds[q];
    if (static_cast<std::size_t>(s.cols()) != per_query || s.rows() != d) {
      throw ConfigError("evaluate: ragged seed blocks");
    }
    const std::size_t target = eval.target_index[q];
    const int genre = eval.genres[q];

    Rng rng(derive_seed(options.seed, q));
    std::size_t neg = 0;
    do {
      neg = static_cast<std::size_t>(rng.below(cat.size()));
    } while (cat.genres[neg] == genre);

    for (std::size_t j = 0; j < per_query; ++j) {
      const auto col = static_cast<Eigen::Index>(q * per_query + j);
      pooled.col(col) = s.col(Eigen::Index(j));
      truth.col(col) = cat.embeddings.col(Eigen::Index(target));
      negative.col(col) = cat.embeddings.col(Eigen::Index(neg));
      images.col(col) = eval.queries.col(Eigen::Index(q));
      const ConceptProxy* proxy = proxy_of_genre[std::size_t(genre)];
      caption.col(col) = proxy ? proxy->text_vector_target : cat.embeddings.col(Eigen::Index(target));
    }
    miscs_sum += miscs(s);

    const RankedList fused = fused_retrieval(index, s, depth);
    std::vector<std::size_t> ranked;
    std::vector<int> ranked_genres;
    for (const auto& item : fused) {
      ranked.push_back(item.index);
      ranked_genres.push_back(index.genre(item.index));
    }
    const std::size_t relevant[] = {target};
    bool counted = false;
    for (int k : options.recall_k) {
      if (const auto r = recall_at_k(ranked, relevant, k)) {
        recall_sum[k] += *r;
        counted = true;
      }
    }
    if (counted) ++recall_count;
    for (int k : options.entropy_k) {
      const auto n = std::min<std::size_t>(std::size_t(k), ranked_genres.size());
      entropy_sum[k] += entropy_at_k(std::span<const int>(ranked_genres.data(), n), setup.num_genres);
    }
  }

  report.fmd = fmd(pooled, setup.reference);
  report.miscs = miscs_sum / double(eval.size());
  report.m2m = alignment_m2m(pooled, truth);
  report.m2c = alignment_m2c(pooled, caption);
  report.m2i = alignment_m2i(pooled, images, text_query, text_target);
  report.triplet_accuracy = triplet_accuracy(pooled, truth, negative);
  report.recall_excluded = eval.size() - recall_count;
  for (int k : options.recall_k) {
    report.recall_at[k] = recall_count ? recall_sum[k] / double(recall_count) : 0.0;
  }
  for (int k : options.entropy_k) report.entropy_at[k] = entropy_sum[k] / double(eval.size());
  return report;
}

}  // namespace seedgen
