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

// Checkpoint files: the 8-byte magic "DSCKPT01", a u64 little-endian header
// length, a JSON header (kind, network spec, tensor layout with byte
// offsets), then the parameters as raw little-endian float32.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "seedgen/diffusion.hpp"
#include "seedgen/nn.hpp"
#include "seedgen/regression.hpp"

namespace seedgen {

struct Checkpoint {
  std::string kind;  // "diffusion" or "regression"
  nn::Params params;
  nlohmann::json meta = nlohmann::json::object();  // kind-specific header fields
};

std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws DataError on a bad magic, malformed header or short payload.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

Checkpoint make_checkpoint(const DenoiserModel& model);
Checkpoint make_checkpoint(const RegressionModel& model);
DenoiserModel denoiser_from(const Checkpoint& ckpt);
RegressionModel regression_from(const Checkpoint& ckpt);

}  // namespace seedgen
