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

// EMB1 embedding files: "EMB1", u32 dim, u64 count, then count * dim
// little-endian float32 values, row after row. A JSON-lines sidecar next to
// the binary (same stem, ".jsonl") carries one {"id", "genre", ...} object
// per row in the same order.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace seedgen {

struct EmbeddingSet {
  Eigen::MatrixXf vectors;          // dim x count
  std::vector<std::string> ids;     // one per column
  std::vector<int> genres;          // empty, or one per column
  std::vector<nlohmann::json> extra;  // empty, or extra sidecar fields per column
};

std::filesystem::path sidecar_path(const std::filesystem::path& binary);

// Writes the binary and its sidecar. Throws ConfigError on inconsistent
// lengths, DataError on IO failure.
void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);

// Throws DataError with "bad magic", "truncated payload" or "dim mismatch"
// in the message for the respective failure.
EmbeddingSet load_embeddings(const std::filesystem::path& path,
                             std::optional<int> expected_dim = std::nullopt);

// Raw binary encode/decode without the sidecar.
std::string encode_emb1(const Eigen::MatrixXf& vectors);
Eigen::MatrixXf decode_emb1(const std::string& bytes, std::optional<int> expected_dim = std::nullopt);

}  // namespace seedgen
