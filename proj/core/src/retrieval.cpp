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

#include "seedgen/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "seedgen/errors.hpp"

namespace seedgen {

Index::Index(const Catalog& catalog)
    : rows_(catalog.embeddings.transpose()), ids_(catalog.ids), genres_(catalog.genres) {
  if (ids_.empty()) throw DataError("index: empty catalog");
  if (static_cast<std::size_t>(rows_.rows()) != ids_.size() || genres_.size() != ids_.size()) {
    throw DataError("index: catalog arrays disagree in length");
  }
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
    if (std::abs(rows_.row(i).norm() - 1.0) > 1e-5) {
      throw DataError("index: item " + ids_[std::size_t(i)] + " is not unit-norm");
    }
  }
}

Index build_index(const Catalog& catalog) { return Index(catalog); }

TopKResult top_k(const Index& index, const Eigen::MatrixXd& seeds, int k) {
  if (k < 1) throw ConfigError("top_k: k must be >= 1");
  if (seeds.rows() != index.dim()) throw ConfigError("top_k: seed dimension mismatch");
  TopKResult result;
  const std::size_t n = index.size();
  const std::size_t keep = std::min<std::size_t>(std::size_t(k), n);
  result.truncated = std::size_t(k) > n;
  const Eigen::MatrixXd scores = index.rows() * seeds;
  auto before = [&index](const ScoredItem& a, const ScoredItem& b) { return index.ranks_before(a, b); };
  std::vector<ScoredItem> all(n);
  for (Eigen::Index s = 0; s < seeds.cols(); ++s) {
    for (std::size_t i = 0; i < n; ++i) all[i] = {i, scores(Eigen::Index(i), s)};
    std::partial_sort(all.begin(), all.begin() + std::ptrdiff_t(keep), all.end(), before);
    result.lists.emplace_back(all.begin(), all.begin() + std::ptrdiff_t(keep));
  }
  return result;
}

RankedList fuse(const Index& index, const std::vector<RankedList>& lists, int k) {
  if (k < 1) throw ConfigError("fuse: k must be >= 1");
  std::unordered_map<std::size_t, double> best;
  for (const auto& list : lists) {
    for (const auto& item : list) {
      auto [it, inserted] = best.emplace(item.index, item.score);
      if (!inserted && item.score > it->second) it->second = item.score;
    }
  }
  RankedList out;
  out.reserve(best.size());
  for (const auto& [i, score] : best) out.push_back({i, score});
  auto before = [&index](const ScoredItem& a, const ScoredItem& b) { return index.ranks_before(a, b); };
  std::sort(out.begin(), out.end(), before);
  if (out.size() > std::size_t(k)) out.resize(std::size_t(k));
  return out;
}

}  // namespace seedgen
