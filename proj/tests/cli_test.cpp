// Copyright 2026 The TCTN Authors.
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

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "tctn/tctn.h"
#include "test_util.hpp"

#ifndef TCTN_CLI_PATH
#error "TCTN_CLI_PATH must name the tctn executable"
#endif

namespace {

using tctn::testing::TempDir;

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(TCTN_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) r.output += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string field(const std::string& text, const std::string& key) {
  const auto at = text.find(key + "=");
  if (at == std::string::npos) return {};
  const auto begin = at + key.size() + 1;
  return text.substr(begin, text.find_first_of(" \n", begin) - begin);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cfg_ = dir_.file("toy.cfg");
    std::ofstream(cfg_) << "input_frames = 3\noutput_frames = 2\nheight = 12\n"
                           "width = 12\nembed_dim = 4\nblocks = 1\ncount = 4\n"
                           "sprite_size = 3\nbatch_size = 2\nepochs = 1\n"
                           "dropout = 0\ndataset = "
                        << dir_.file("d.tctd") << "\ncheckpoint = "
                        << dir_.file("m.ckpt") << "\n";
  }
  std::string base(const std::string& cmd, const std::string& out = "out") {
    return cmd + " --config " + cfg_ + " --out " + dir_.file(out);
  }

  TempDir dir_{"cli"};
  std::string cfg_;
};

TEST_F(CliTest, DatagenIsReproducible) {
  const RunResult a = run(base("datagen") + " --seed 7 --set count=10");
  ASSERT_EQ(a.status, 0) << a.output;
  const RunResult b = run(base("datagen") + " --seed 7 --set count=10");
  ASSERT_EQ(b.status, 0) << b.output;
  EXPECT_EQ(field(a.output, "count"), "10");
  EXPECT_EQ(field(a.output, "length"), "5");
  EXPECT_FALSE(field(a.output, "checksum").empty());
  EXPECT_EQ(field(a.output, "checksum"), field(b.output, "checksum"));
  // The echoed effective config alone reproduces the run.
  const std::string echo = dir_.file("out/datagen.config");
  ASSERT_TRUE(std::filesystem::exists(echo));
  const RunResult c = run("datagen --config " + echo);
  ASSERT_EQ(c.status, 0) << c.output;
  EXPECT_EQ(field(c.output, "checksum"), field(a.output, "checksum"));
  const RunResult d = run(base("datagen") + " --seed 8 --set count=10");
  EXPECT_NE(field(d.output, "checksum"), field(a.output, "checksum"));
}

TEST_F(CliTest, DatagenDefaultsAreTwentyFramesOf64x64) {
  const RunResult r =
      run("datagen --out " + dir_.file("def") + " --set count=2");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(field(r.output, "length"), "20");
  EXPECT_EQ(field(r.output, "height"), "64");
  EXPECT_EQ(field(r.output, "width"), "64");
}

TEST_F(CliTest, ErrorExitCodes) {
  const RunResult zero = run(base("datagen") + " --set count=0");
  EXPECT_EQ(zero.status, 2) << zero.output;
  EXPECT_NE(zero.output.find("count"), std::string::npos);
  EXPECT_EQ(run(base("train") + " --set bogus=1").status, 2);
  EXPECT_EQ(run(base("eval") + " --set checkpoint=" + dir_.file("none.ckpt")).status, 3);
  EXPECT_EQ(run(base("train")).status, 3);  // dataset not generated yet
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run(base("datagen") + " --threads 0").status, 2);
  std::ofstream(dir_.file("garbage.tctd")) << "not a dataset";
  EXPECT_EQ(run(base("train") + " --set dataset=" + dir_.file("garbage.tctd")).status, 4);
  // A checkpoint whose architecture disagrees with the data.
  ASSERT_EQ(run(base("datagen")).status, 0);
  ASSERT_EQ(run(base("train")).status, 0);
  ASSERT_EQ(run(base("datagen") + " --set height=16 --set dataset=" + dir_.file("big.tctd")).status, 0);
  EXPECT_EQ(run(base("eval") + " --set dataset=" + dir_.file("big.tctd")).status, 4);
}

TEST_F(CliTest, TrainEvalPredict) {
  ASSERT_EQ(run(base("datagen")).status, 0);
  const RunResult t = run(base("train") + " --seed 3");
  ASSERT_EQ(t.status, 0) << t.output;
  std::ifstream log(dir_.file("out/train_log.csv"));
  std::string header;
  std::getline(log, header);
  EXPECT_EQ(header, "epoch,step,loss,lr");
  EXPECT_TRUE(std::filesystem::exists(dir_.file("m.ckpt")));

  const RunResult e = run(base("eval"));
  ASSERT_EQ(e.status, 0) << e.output;
  std::ifstream csv(dir_.file("out/metrics.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 4);  // header, K = 2 frames, mean

  const RunResult p = run(base("predict", "pred") + " --set sequence_index=3");
  ASSERT_EQ(p.status, 0) << p.output;
  int pgm = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_.file("pred"))) {
    if (entry.path().extension() == ".pgm") ++pgm;
  }
  EXPECT_EQ(pgm, 2);
  std::ifstream img(dir_.file("pred/pred_01.pgm"), std::ios::binary);
  std::string magic, w, h, maxval;
  img >> magic >> w >> h >> maxval;
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, "12");
  EXPECT_EQ(maxval, "255");
  EXPECT_EQ(std::filesystem::file_size(dir_.file("pred/pred_01.pgm")),
            std::string("P5\n12 12\n255\n").size() + 144);
  EXPECT_TRUE(std::filesystem::exists(dir_.file("pred/prediction.tctd")));
  EXPECT_EQ(run(base("predict") + " --set sequence_index=4").status, 2);
}

TEST_F(CliTest, EvalOnUntrainedCheckpointIsFinite) {
  ASSERT_EQ(run(base("datagen")).status, 0);
  tctn_config* c = nullptr;
  ASSERT_EQ(tctn_config_create(&c), TCTN_OK);
  ASSERT_EQ(tctn_config_merge_file(c, cfg_.c_str()), TCTN_OK);
  tctn_model* m = nullptr;
  ASSERT_EQ(tctn_model_create(c, &m), TCTN_OK);
  ASSERT_EQ(tctn_model_save(m, dir_.file("m.ckpt").c_str()), TCTN_OK);
  tctn_model_destroy(m);
  tctn_config_destroy(c);

  const RunResult e = run(base("eval"));
  ASSERT_EQ(e.status, 0) << e.output;
  std::ifstream csv(dir_.file("out/metrics.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    for (int i = 0; i < 3; ++i) {
      ASSERT_TRUE(std::getline(ss, cell, ','));
      EXPECT_TRUE(std::isfinite(std::stod(cell))) << line;
    }
  }
}

TEST_F(CliTest, GradcheckPasses) {
  const RunResult r = run("gradcheck --out " + dir_.file("gc") + " --set gradcheck_trials=2");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("passed"), std::string::npos);
  EXPECT_NE(r.output.find("forecast.weight"), std::string::npos);
}

}  // namespace
