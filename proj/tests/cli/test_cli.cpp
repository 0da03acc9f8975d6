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

// Drives the built command-line tool through a tiny end-to-end pipeline.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kTiny =
    " --world.target_dim=8 --world.query_dim=12 --world.num_genres=4 --world.items_per_genre=20"
    " --train.total_steps=200 --train.warmup=20 --model.width=16 --model.num_blocks=2"
    " --sampler.steps=12 --eval.samples_per_query=4 --eval.max_queries=8";

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SEEDGEN_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = tmp_.path();
    ASSERT_EQ(run("synth --out " + (root_ / "w").string() + kTiny, log()), 0) << slurp(log());
    ASSERT_EQ(run("train --data " + (root_ / "w").string() + " --out " + (root_ / "m").string() + kTiny, log()), 0)
        << slurp(log());
  }
  fs::path log() const { return root_ / "log.txt"; }
  std::string path(const std::string& rel) const { return (root_ / rel).string(); }

  seedgen::testing::TempDir tmp_;
  fs::path root_;
};

TEST_F(Cli, PipelineWritesArtifactsAndManifests) {
  for (const char* f : {"w/world.json", "w/catalog.emb1", "w/manifest.json", "m/model.ckpt", "m/train_log.jsonl",
                        "m/config.json", "m/manifest.json"}) {
    EXPECT_TRUE(fs::exists(root_ / f)) << f;
  }
  const json manifest = json::parse(slurp(root_ / "m/manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_FALSE(manifest["inputs"].empty());
  EXPECT_EQ(manifest["outputs"].size(), 3u);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 40u);

  const std::string ckpt = path("m/model.ckpt"), data = path("w");
  ASSERT_EQ(run("sample --ckpt " + ckpt + " --data " + data + " --out " + path("s") + " --steer genre-1:+0.05", log()), 0)
      << slurp(log());
  ASSERT_EQ(run("eval --samples " + path("s/samples.emb1") + " --data " + data + " --out " + path("e"), log()), 0)
      << slurp(log());
  const json metrics = json::parse(slurp(root_ / "e/metrics.json"));
  EXPECT_EQ(metrics["queries"], 8);
  EXPECT_EQ(metrics["samples_per_query"], 4);

  ASSERT_EQ(run("sweep --ckpt " + ckpt + " --data " + data + " --out " + path("sw") + " --omegas -1,0,5 --jobs 2", log()),
            0)
      << slurp(log());
  EXPECT_TRUE(fs::exists(root_ / "sw/sweep.tsv"));
  EXPECT_TRUE(fs::exists(root_ / "sw/omega_-1.json"));
  EXPECT_EQ(json::parse(slurp(root_ / "sw/sweep.json"))["rows"].size(), 3u);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const std::string ckpt = path("m/model.ckpt"), data = path("w");
  ASSERT_EQ(run("train --data " + data + " --out " + path("m2") + kTiny, log()), 0) << slurp(log());
  EXPECT_EQ(slurp(root_ / "m/model.ckpt"), slurp(root_ / "m2/model.ckpt"));

  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(run("sample --ckpt " + ckpt + " --data " + data + " --out " + path(out) + " --seed 4 --omega 2", log()), 0)
        << slurp(log());
  }
  EXPECT_EQ(slurp(root_ / "a/samples.emb1"), slurp(root_ / "b/samples.emb1"));
  EXPECT_EQ(slurp(root_ / "a/samples.jsonl"), slurp(root_ / "b/samples.jsonl"));

  for (const char* out : {"s1", "s4"}) {
    const std::string jobs = std::string(out) == "s1" ? "1" : "4";
    ASSERT_EQ(run("sweep --ckpt " + ckpt + " --data " + data + " --out " + path(out) + " --omegas 0,2,5 --jobs " + jobs,
                  log()),
              0);
  }
  EXPECT_EQ(slurp(root_ / "s1/sweep.tsv"), slurp(root_ / "s4/sweep.tsv"));
}

TEST_F(Cli, ExitCodes) {
  const std::string ckpt = path("m/model.ckpt"), data = path("w");
  EXPECT_EQ(run("--help", log()), 0);
  EXPECT_EQ(run("", log()), 2);
  EXPECT_EQ(run("synth --out " + path("x") + " --world.nope=1", log()), 2);
  EXPECT_EQ(run("synth --out " + path("x") + " --world.ambiguity=99", log()), 2);
  EXPECT_EQ(run("sample --ckpt " + ckpt + " --data " + data + " --out " + path("x") + " --steer nope:1", log()), 2);
  EXPECT_EQ(run("train --data " + path("missing") + " --out " + path("x"), log()), 3);
  std::ofstream(root_ / "bad.ckpt") << "garbage";
  EXPECT_EQ(run("eval --ckpt " + path("bad.ckpt") + " --data " + data + " --out " + path("x"), log()), 3);
  EXPECT_EQ(run("train --data " + data + " --out " + path("x") + kTiny + " --train.peak_lr=1e30", log()), 4)
      << slurp(log());
}

}  // namespace
