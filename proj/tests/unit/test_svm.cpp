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

#include <cmath>
#include <filesystem>

#include "lowfake/error.hpp"
#include "lowfake/random.hpp"
#include "lowfake/svm.hpp"

using namespace lowfake;
using namespace lowfake::svm;

namespace {

struct ToySet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

ToySet toy(double scale = 1.0) {
  ToySet t;
  for (int i = 0; i < 50; ++i) {
    t.x.push_back({2.0 * scale, 0.0});
    t.y.push_back(1);
    t.x.push_back({-2.0 * scale, 0.0});
    t.y.push_back(-1);
  }
  return t;
}

double train_accuracy(const LinearModel& m, const ToySet& t) {
  std::size_t right = 0;
  for (std::size_t i = 0; i < t.x.size(); ++i) right += (classify(m, t.x[i]) ? 1 : -1) == t.y[i];
  return static_cast<double>(right) / t.x.size();
}

}  // namespace

TEST(Svm, ScoreArithmetic) {
  LinearModel zero{std::vector<double>(3, 0.0), 0.0};
  EXPECT_EQ(score(zero, std::vector<double>{1, 2, 3}), 0.0);
  LinearModel m{{1.0, 0.0, 0.0}, -1.0};
  EXPECT_DOUBLE_EQ(score(m, std::vector<double>{3, 0, 0}), 2.0);
  EXPECT_THROW(score(m, std::vector<double>{1, 2}), ShapeError);
}

TEST(Svm, SeparableToySet) {
  const auto t = toy();
  const auto m = train(t.x, t.y, {.epochs = 100, .seed = 3});
  EXPECT_DOUBLE_EQ(train_accuracy(m, t), 1.0);
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    if (t.y[i] == 1) {
      EXPECT_GT(score(m, t.x[i]), 0.0);
    }
    EXPECT_EQ(classify(m, t.x[i]), score(m, t.x[i]) >= 0.0);
  }
}

TEST(Svm, RescaledFeaturesKeepTheSignPattern) {
  const auto a = toy(1.0), b = toy(2.0);
  const auto ma = train(a.x, a.y, {.seed = 5});
  const auto mb = train(b.x, b.y, {.seed = 5});
  for (std::size_t i = 0; i < a.x.size(); ++i) EXPECT_EQ(classify(ma, a.x[i]), classify(mb, b.x[i]));
  EXPECT_NE(score(ma, a.x[0]), score(mb, b.x[0]));
}

TEST(Svm, IdenticalFeaturesCannotBeSeparated) {
  ToySet t;
  for (int i = 0; i < 100; ++i) {
    t.x.push_back({1.0, 1.0});
    t.y.push_back(i % 2 ? 1 : -1);
  }
  const auto m = train(t.x, t.y, {.seed = 1});
  EXPECT_DOUBLE_EQ(train_accuracy(m, t), 0.5);
}

TEST(Svm, ObjectiveMostlyDecreasesAtCheckpoints) {
  const auto t = toy();
  std::vector<double> checkpoints;
  TrainOptions opt{.epochs = 1000, .seed = 2};
  opt.on_epoch = [&](std::size_t epoch, double obj) {
    if (epoch % 10 == 0) checkpoints.push_back(obj);
  };
  train(t.x, t.y, opt);
  ASSERT_EQ(checkpoints.size(), 100u);
  for (std::size_t start = 0; start + 10 < checkpoints.size(); ++start) {
    int non_increasing = 0;
    for (std::size_t k = start; k < start + 10; ++k) non_increasing += checkpoints[k + 1] <= checkpoints[k] + 1e-12;
    EXPECT_GE(non_increasing, 8) << "window at checkpoint " << start;
  }
  EXPECT_LT(checkpoints.back(), checkpoints.front());
}

TEST(Svm, ConvergesNearTheMaxMarginSolution) {
  // Optimum for the toy set: w = (0.5, 0), b = 0, objective lambda / 8.
  const auto t = toy();
  const auto m = train(t.x, t.y, {.epochs = 100, .seed = 4});
  EXPECT_LT(objective(m, t.x, t.y), 1e-3);
  EXPECT_NEAR(m.weights[0], 0.5, 0.5);
  EXPECT_LT(std::abs(m.bias), 1.0);
}

TEST(Svm, DeterministicUnderSeed) {
  const auto t = toy();
  const auto a = train(t.x, t.y, {.seed = 11});
  const auto b = train(t.x, t.y, {.seed = 11});
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Svm, InputValidation) {
  std::vector<std::vector<double>> x{{1.0}, {2.0}};
  EXPECT_THROW(train(x, std::vector<int>{1, 1}), ConfigError);
  EXPECT_THROW(train(x, std::vector<int>{1, 0}), ConfigError);
  EXPECT_THROW(train({}, std::vector<int>{}), ConfigError);
  std::vector<std::vector<double>> ragged{{1.0}, {2.0, 3.0}};
  EXPECT_THROW(train(ragged, std::vector<int>{1, -1}), ConfigError);
}

TEST(Svm, ArchiveRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lowfake_svm_roundtrip.lfw";
  LinearModel m{{0.5f, -0.25f, 1.0f}, 0.125, 1e-4};
  save_model(path, m);
  const auto back = load_model(path);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_DOUBLE_EQ(back.lambda, m.lambda);
  std::filesystem::remove(path);
}
