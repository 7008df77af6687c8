/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lowfake/cli.hpp"
#include "lowfake/data/manifest.hpp"
#include "lowfake/data/weights.hpp"
#include "lowfake/error.hpp"
#include "lowfake/lfd.hpp"
#include "lowfake/trainer.hpp"

using namespace lowfake;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("lowfake_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lowfake");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Restores LOWFAKE_SEED when a test changes it.
class SeedEnv {
 public:
  SeedEnv() {
    if (const char* v = std::getenv("LOWFAKE_SEED")) saved_ = v;
  }
  ~SeedEnv() {
    if (saved_) {
      ::setenv("LOWFAKE_SEED", saved_->c_str(), 1);
    } else {
      ::unsetenv("LOWFAKE_SEED");
    }
  }

 private:
  std::optional<std::string> saved_;
};

}  // namespace

TEST(Cli, PrintParamsIsExact) {
  EXPECT_EQ(invoke({"meso", "build", "--print-params"}).out, "27977\n");
  EXPECT_EQ(invoke({"meso", "build", "--model", "mesoinception4", "--print-params"}).out, "28615\n");
  const auto r = invoke({"meso", "build", "--conv-act", "pish", "--dense-act", "mish"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("input: (256,256,3)"), std::string::npos);
  EXPECT_NE(r.out.find("conv_activation: pish"), std::string::npos);
  EXPECT_NE(r.out.find("trainable_params: 27977"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwoAndHelpExitsZero) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"meso"}).code, 2);
  EXPECT_EQ(invoke({"meso", "build", "--conv-act", "tanh"}).code, 2);
  EXPECT_EQ(invoke({"meso", "grid", "--stage", "4", "--dry-run"}).code, 2);
  EXPECT_EQ(invoke({"meso", "train", "--out", "x"}).code, 2);
  const auto help = invoke({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("depthnet"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitOne) {
  const auto r = invoke({"meso", "eval", "--weights", "/nonexistent/w.lfw", "--manifest", "/nonexistent/m.csv"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(invoke({"meso", "grid", "--stage", "1"}).code, 1);  // no manifest
  EXPECT_EQ(invoke({"bench", "activations", "--n", "1000"}).code, 1);
}

TEST(Cli, SeedComesFromEnvironment) {
  SeedEnv guard;
  EXPECT_EQ(cli::parse_seed("42"), 42u);
  EXPECT_EQ(cli::parse_seed("18446744073709551615"), 18446744073709551615ull);
  EXPECT_FALSE(cli::parse_seed(""));
  EXPECT_FALSE(cli::parse_seed("-1"));
  EXPECT_FALSE(cli::parse_seed("12x"));
  ::unsetenv("LOWFAKE_SEED");
  EXPECT_EQ(cli::default_seed(), 0u);
  ::setenv("LOWFAKE_SEED", "7", 1);
  EXPECT_EQ(cli::default_seed(), 7u);
  ::setenv("LOWFAKE_SEED", "seven", 1);
  EXPECT_THROW(cli::default_seed(), ConfigError);
  const auto r = invoke({"meso", "grid", "--stage", "1", "--dry-run"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("LOWFAKE_SEED"), std::string::npos);
}

TEST(Cli, GridDryRunListsEveryStage) {
  const auto s1 = invoke({"meso", "grid", "--stage", "1", "--dry-run"});
  const auto s2 = invoke({"meso", "grid", "--stage", "2", "--dry-run"});
  const auto s3 = invoke({"meso", "grid", "--stage", "3", "--dry-run"});
  EXPECT_EQ(line_count(s1.out), 37u);
  EXPECT_EQ(line_count(s2.out), 19u);
  EXPECT_EQ(line_count(s3.out), 6u);
  EXPECT_EQ(s1.out.substr(0, s1.out.find('\n')), "run,combination,lr_start,repetitions");
  EXPECT_NE(s2.err.find("18 runs, 54 trainings"), std::string::npos);
}

TEST(Cli, SeedMakesBuildDeterministic) {
  TempDir dir;
  ASSERT_EQ(invoke({"meso", "build", "--out", dir / "a.lfw", "--seed", "3"}).code, 0);
  ASSERT_EQ(invoke({"meso", "build", "--out", dir / "b.lfw", "--seed", "3"}).code, 0);
  ASSERT_EQ(invoke({"meso", "build", "--out", dir / "c.lfw", "--seed", "4"}).code, 0);
  EXPECT_EQ(read_text(dir / "a.lfw"), read_text(dir / "b.lfw"));
  EXPECT_NE(read_text(dir / "a.lfw"), read_text(dir / "c.lfw"));
  EXPECT_EQ(data::read_archive(dir / "a.lfw").metadata.at("input_shape"), "256x256x3");
}

TEST(Cli, TrainEvalAndBenchOnTinyImages) {
  TempDir dir;
  ASSERT_EQ(invoke({"synth", "gradients", "--out", dir / "set", "--count", "40", "--extent", "32"}).code, 0);
  std::ofstream(dir / "tiny.cfg") << "input_size = 16\nbatch_size = 8\nmax_epochs = 2\naugment = false\n"
                                     "bn_momentum = 0.8\nlr_start = 0.01\n";
  const auto train = invoke({"meso", "train", "--manifest", dir / "set/manifest.csv", "--config", dir / "tiny.cfg",
                              "--out", dir / "w.lfw", "--history", dir / "h.csv", "--seed", "5"});
  ASSERT_EQ(train.code, 0) << train.err;
  EXPECT_EQ(line_count(train.out), 3u);
  EXPECT_EQ(line_count(read_text(dir / "h.csv")), 3u);
  EXPECT_EQ(data::read_archive(dir / "w.lfw").metadata.at("input_shape"), "16x16x3");

  const auto eval = invoke({"meso", "eval", "--weights", dir / "w.lfw", "--manifest", dir / "set/manifest.csv",
                             "--roc", dir / "roc.csv"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto report = nlohmann::json::parse(eval.out);
  const auto& counts = report.at("counts");
  EXPECT_EQ(counts.at("tp").get<int>() + counts.at("fp").get<int>() + counts.at("tn").get<int>() +
                counts.at("fn").get<int>(),
            40);
  EXPECT_GE(report.at("accuracy").get<double>(), 0.0);
  EXPECT_EQ(read_text(dir / "roc.csv").rfind("threshold,fpr,fnr,tpr", 0), 0u);

  const auto bench = invoke({"bench", "inference", "--weights", dir / "w.lfw", "--batch", "4", "--reps", "2"});
  ASSERT_EQ(bench.code, 0) << bench.err;
  EXPECT_EQ(bench.out.rfind("batch,repetitions,seconds_per_image,reference_seconds\n4,2,", 0), 0u);
}

TEST(Cli, LfdPipelineWithBoxesAndSidecars) {
  TempDir dir;
  ASSERT_EQ(invoke({"synth", "forgery", "--out", dir / "set", "--count", "12", "--seed", "2"}).code, 0);
  const auto manifest = dir / "set/manifest.csv";
  const auto extract = invoke({"lfd", "extract", "--manifest", manifest, "--out", dir / "f.csv"});
  ASSERT_EQ(extract.code, 0) << extract.err;
  const auto rows = lfd::load_feature_csv(dir / "f.csv");
  ASSERT_EQ(rows.size(), 12u);

  // A box covering the whole 200x200 image is the identity crop.
  const auto records = data::load_manifest(manifest);
  {
    std::ofstream boxes(dir / "boxes.csv");
    boxes << "path,left,top,width,height\n";
    for (const auto& r : records) boxes << r.path << ",0,0,200,200\n";
  }
  ASSERT_EQ(invoke({"lfd", "extract", "--manifest", manifest, "--bbox", dir / "boxes.csv", "--out", dir / "fb.csv"})
                .code,
            0);
  EXPECT_EQ(read_text(dir / "f.csv"), read_text(dir / "fb.csv"));

  // Sidecars written from the built-in detector reproduce its features.
  for (const auto& r : records) {
    const auto kps = lfd::image_keypoints(r.path, lfd::Detector::fast, std::nullopt, {});
    lfd::write_keypoint_sidecar(lfd::sidecar_path(r.path), kps);
  }
  ASSERT_EQ(invoke({"lfd", "extract", "--manifest", manifest, "--detector", "sidecar", "--out", dir / "fs.csv"}).code,
            0);
  const auto sidecar_rows = lfd::load_feature_csv(dir / "fs.csv");
  ASSERT_EQ(sidecar_rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(sidecar_rows[i].label, rows[i].label);
    for (std::size_t j = 0; j < lfd::kFeatureSize; ++j) EXPECT_NEAR(sidecar_rows[i].features[j], rows[i].features[j], 1e-12);
  }

  ASSERT_EQ(invoke({"lfd", "train", "--features", dir / "f.csv", "--out", dir / "svm.lfw", "--seed", "1"}).code, 0);
  const auto eval = invoke({"lfd", "eval", "--model", dir / "svm.lfw", "--features", dir / "f.csv"});
  ASSERT_EQ(eval.code, 0) << eval.err;
  const auto report = nlohmann::json::parse(eval.out);
  EXPECT_GE(report.at("accuracy").get<double>(), 0.5);
  EXPECT_LE(report.at("eer").get<double>(), 0.5);

  const auto bench = invoke({"bench", "lfd", "--manifest", manifest, "--model", dir / "svm.lfw"});
  ASSERT_EQ(bench.code, 0) << bench.err;
  EXPECT_EQ(bench.out.rfind("images,keypoints_per_image,", 0), 0u);
}

TEST(Cli, SmallDepthSweep) {
  TempDir dir;
  const auto r = invoke({"depthnet", "sweep", "--min", "1", "--max", "2", "--act", "relu", "--act", "pish",
                          "--samples", "300", "--epochs", "1", "--out", dir / "d.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_text(dir / "d.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "depth,relu,pish");
  EXPECT_EQ(line_count(csv), 3u);
  EXPECT_EQ(line_count(r.err), 4u);
  EXPECT_EQ(invoke({"depthnet", "sweep", "--min", "3", "--max", "2"}).code, 1);
}
