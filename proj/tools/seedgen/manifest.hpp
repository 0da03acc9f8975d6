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

// Run manifests: resolved config, its hash, and git-style blob hashes of
// every input and output file.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace seedgen::cli {

// SHA-1 of "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_hash(const std::string& content);
std::string git_blob_hash_file(const std::filesystem::path& path);

class Manifest {
 public:
  Manifest(std::string command, nlohmann::json config);

  // A file, or every regular file below a directory.
  void add_input(const std::filesystem::path& path);
  // Hashes everything under `out_dir` and writes out_dir/manifest.json.
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string command_;
  nlohmann::json config_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::string started_;
};

}  // namespace seedgen::cli
