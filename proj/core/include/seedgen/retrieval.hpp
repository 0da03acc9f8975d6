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

// Exact dot-product nearest-neighbor retrieval over a catalog.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seedgen/world.hpp"

namespace seedgen {

struct ScoredItem {
  std::size_t index = 0;  // catalog row
  double score = 0.0;
};

using RankedList = std::vector<ScoredItem>;

// Immutable after construction; queries may run concurrently.
class Index {
 public:
  explicit Index(const Catalog& catalog);

  std::size_t size() const { return ids_.size(); }
  int dim() const { return static_cast<int>(rows_.cols()); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  int genre(std::size_t i) const { return genres_[i]; }
  const Eigen::MatrixXd& rows() const { return rows_; }

  // Strict ranking order: higher score first, then ascending id.
  bool ranks_before(const ScoredItem& a, const ScoredItem& b) const {
    if (a.score != b.score) return a.score > b.score;
    return ids_[a.index] < ids_[b.index];
  }

 private:
  Eigen::MatrixXd rows_;  // n x d
  std::vector<std::string> ids_;
  std::vector<int> genres_;
};

// Throws DataError for an empty catalog or non-unit rows.
Index build_index(const Catalog& catalog);

struct TopKResult {
  std::vector<RankedList> lists;  // one per seed
  bool truncated = false;         // k exceeded the catalog size
};

// seeds: dim x m. Throws ConfigError for k < 1 or a dimension mismatch.
TopKResult top_k(const Index& index, const Eigen::MatrixXd& seeds, int k);

// Max-score fusion of several ranked lists into one list of at most k
// distinct items.
RankedList fuse(const Index& index, const std::vector<RankedList>& lists, int k);

}  // namespace seedgen
