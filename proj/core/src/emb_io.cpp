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

#include "seedgen/emb_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seedgen/errors.hpp"

namespace seedgen {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t pos) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return value;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& binary) {
  auto p = binary;
  p.replace_extension(".jsonl");
  return p;
}

std::string encode_emb1(const Eigen::MatrixXf& vectors) {
  std::string out(kMagic, 4);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(vectors.rows()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(vectors.cols()));
  out.reserve(kHeaderBytes + 4 * vectors.size());
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(vectors(r, c)));
    }
  }
  return out;
}

Eigen::MatrixXf decode_emb1(const std::string& bytes, std::optional<int> expected_dim) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("EMB1: bad magic");
  }
  if (bytes.size() < kHeaderBytes) throw DataError("EMB1: truncated payload (header)");
  const auto dim = get_le<std::uint32_t>(bytes, 4);
  const auto count = get_le<std::uint64_t>(bytes, 8);
  if (expected_dim && static_cast<std::uint32_t>(*expected_dim) != dim) {
    throw DataError("EMB1: dim mismatch (file " + std::to_string(dim) + ", expected " +
                    std::to_string(*expected_dim) + ")");
  }
  if (dim == 0 && count > 0) throw DataError("EMB1: dim mismatch (zero dimension)");
  const std::uint64_t need = static_cast<std::uint64_t>(dim) * count * 4;
  if (count != 0 && need / count / 4 != dim) throw DataError("EMB1: truncated payload (size overflow)");
  if (bytes.size() - kHeaderBytes < need) throw DataError("EMB1: truncated payload");
  if (bytes.size() - kHeaderBytes > need) throw DataError("EMB1: trailing bytes after payload");
  Eigen::MatrixXf out(dim, static_cast<Eigen::Index>(count));
  std::size_t pos = kHeaderBytes;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r, pos += 4) {
      out(r, c) = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
    }
  }
  return out;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set) {
  const auto n = static_cast<std::size_t>(set.vectors.cols());
  if (set.ids.size() != n) throw ConfigError("save_embeddings: ids/vectors length mismatch");
  if (!set.genres.empty() && set.genres.size() != n) {
    throw ConfigError("save_embeddings: genres/vectors length mismatch");
  }
  if (!set.extra.empty() && set.extra.size() != n) {
    throw ConfigError("save_embeddings: extra/vectors length mismatch");
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    const std::string bytes = encode_emb1(set.vectors);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path.string());
  }
  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (!side) throw DataError("cannot write " + sidecar_path(path).string());
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = set.extra.empty() ? nlohmann::json::object() : set.extra[i];
    row["id"] = set.ids[i];
    if (!set.genres.empty()) row["genre"] = set.genres[i];
    side << row.dump() << '\n';
  }
}

EmbeddingSet load_embeddings(const std::filesystem::path& path, std::optional<int> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  EmbeddingSet set;
  set.vectors = decode_emb1(buf.str(), expected_dim);

  std::ifstream side(sidecar_path(path));
  if (!side) throw DataError("missing sidecar " + sidecar_path(path).string());
  std::string line;
  bool any_genre = false;
  std::vector<int> genres;
  while (std::getline(side, line)) {
    if (line.empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("sidecar: malformed row: " + std::string(e.what()));
    }
    if (!row.contains("id")) throw DataError("sidecar: row without id");
    set.ids.push_back(row.at("id").get<std::string>());
    if (row.contains("genre")) {
      any_genre = true;
      genres.push_back(row.at("genre").get<int>());
    } else {
      genres.push_back(-1);
    }
    row.erase("id");
    row.erase("genre");
    set.extra.push_back(std::move(row));
  }
  if (set.ids.size() != static_cast<std::size_t>(set.vectors.cols())) {
    throw DataError("sidecar: " + std::to_string(set.ids.size()) + " rows for " +
                    std::to_string(set.vectors.cols()) + " vectors");
  }
  if (any_genre) set.genres = std::move(genres);
  bool any_extra = false;
  for (const auto& e : set.extra) any_extra = any_extra || !e.empty();
  if (!any_extra) set.extra.clear();
  return set;
}

}  // namespace seedgen
