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

#include "manifest.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "seedgen/errors.hpp"

namespace seedgen::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(root)) return {root};
  if (!fs::is_directory(root)) throw DataError("no such file or directory: " + root.string());
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string git_blob_hash(const std::string& content) {
  const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    throw DataError("sha1 failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::string git_blob_hash_file(const fs::path& path) { return git_blob_hash(read_file(path)); }

Manifest::Manifest(std::string command, json config)
    : command_(std::move(command)), config_(std::move(config)), started_(utc_now()) {}

void Manifest::add_input(const fs::path& path) {
  for (const auto& f : files_under(path)) {
    inputs_.push_back({{"path", f.generic_string()}, {"hash", git_blob_hash_file(f)}});
  }
}

void Manifest::write(const fs::path& out_dir) const {
  json outputs = json::array();
  for (const auto& f : files_under(out_dir)) {
    if (f.filename() == "manifest.json") continue;
    outputs.push_back({{"path", fs::relative(f, out_dir).generic_string()}, {"hash", git_blob_hash_file(f)}});
  }
  const json m = {{"v", 1},
                  {"command", command_},
                  {"config", config_},
                  {"config_hash", git_blob_hash(config_.dump())},
                  {"inputs", inputs_},
                  {"outputs", outputs},
                  {"log", {{"started_utc", started_}, {"finished_utc", utc_now()}}}};
  std::ofstream out(out_dir / "manifest.json");
  out << m.dump(2) << '\n';
  if (!out) throw DataError("cannot write " + (out_dir / "manifest.json").string());
}

}  // namespace seedgen::cli
