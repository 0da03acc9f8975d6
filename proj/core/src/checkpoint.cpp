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

#include "seedgen/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seedgen/errors.hpp"

namespace seedgen {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= std::uint64_t(static_cast<unsigned char>(in[pos + std::size_t(i)])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  const auto layout = nn::ParamLayout::for_spec(ckpt.params.spec);
  if (ckpt.params.values.size() != layout.total_size()) {
    throw ConfigError("checkpoint: parameter count does not match the spec");
  }
  nlohmann::json header = ckpt.meta;
  header["format"] = "DSCKPT01";
  header["kind"] = ckpt.kind;
  header["spec"] = ckpt.params.spec;
  header["order"] = "row-major";
  header["dtype"] = "float32-le";
  header["payload_bytes"] = layout.total_size() * 4;
  auto& tensors = header["layout"] = nlohmann::json::array();
  for (const auto& slot : layout.slots()) {
    tensors.push_back({{"name", slot.name},
                       {"rows", slot.rows},
                       {"cols", slot.cols},
                       {"byte_offset", slot.offset * 4},
                       {"bytes", slot.size() * 4}});
  }
  const std::string text = header.dump();
  std::string out(kMagic, 8);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + 4 * ckpt.params.values.size());
  for (float v : ckpt.params.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw DataError("checkpoint: bad magic");
  }
  if (bytes.size() < 16) throw DataError("checkpoint: truncated header");
  const std::uint64_t header_len = get_u(bytes, 8, 8);
  if (bytes.size() - 16 < header_len) throw DataError("checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint: malformed header: " + std::string(e.what()));
  }
  Checkpoint ckpt;
  try {
    ckpt.kind = header.at("kind").get<std::string>();
    ckpt.params.spec = header.at("spec").get<nn::NetworkSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint: header missing fields: " + std::string(e.what()));
  }
  ckpt.params.spec.validate();
  const auto layout = nn::ParamLayout::for_spec(ckpt.params.spec);
  const std::size_t payload_at = 16 + header_len;
  const std::size_t need = layout.total_size() * 4;
  if (bytes.size() - payload_at != need) throw DataError("checkpoint: payload size mismatch");
  ckpt.params.values.resize(layout.total_size());
  for (std::size_t i = 0; i < layout.total_size(); ++i) {
    ckpt.params.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_u(bytes, payload_at + 4 * i, 4)));
  }
  for (const char* key : {"format", "kind", "spec", "order", "dtype", "payload_bytes", "layout"}) {
    header.erase(key);
  }
  ckpt.meta = std::move(header);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string bytes = encode_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

Checkpoint make_checkpoint(const DenoiserModel& model) {
  return {"diffusion", model.params, {{"schedule", model.schedule}}};
}

Checkpoint make_checkpoint(const RegressionModel& model) {
  return {"regression", model.params, {{"noise_feature", model.noise_feature}}};
}

DenoiserModel denoiser_from(const Checkpoint& ckpt) {
  if (ckpt.kind != "diffusion") throw DataError("checkpoint: expected kind 'diffusion', got '" + ckpt.kind + "'");
  if (!ckpt.meta.contains("schedule")) throw DataError("checkpoint: diffusion header lacks schedule");
  return {ckpt.params, ckpt.meta.at("schedule").get<ScheduleConfig>()};
}

RegressionModel regression_from(const Checkpoint& ckpt) {
  if (ckpt.kind != "regression") throw DataError("checkpoint: expected kind 'regression', got '" + ckpt.kind + "'");
  return {ckpt.params, ckpt.meta.value("noise_feature", 0.0)};
}

}  // namespace seedgen
