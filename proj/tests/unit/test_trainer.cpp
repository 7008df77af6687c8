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
#include <limits>
#include <set>
#include <sstream>

#include "lowfake/error.hpp"
#include "lowfake/random.hpp"
#include "lowfake/trainer.hpp"

using namespace lowfake;
using namespace lowfake::trainer;

namespace {

nn::ParameterStore<float> scalar_store(float w) {
  nn::ParameterStore<float> p;
  p.add("w", true, nn::Tensor<float>({1}, w));
  p.add("running", false, nn::Tensor<float>({1}, 5.0f));
  return p;
}

nn::GradMap<float> scalar_grad(float g) {
  nn::GradMap<float> m;
  m.emplace("w", nn::Tensor<float>({1}, g));
  return m;
}

// Bright images are fake (1), dark ones pristine (0), with pixel noise.
data::InMemoryDataset brightness_set(std::size_t n, std::uint64_t seed) {
  data::InMemoryDataset ds({16, 16, 3});
  Rng rng(seed);
  std::vector<float> px(16 * 16 * 3);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    for (float& v : px) v = static_cast<float>((label ? 0.7 : 0.3) + uniform(rng, -0.15, 0.15));
    ds.add(px, label);
  }
  return ds;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.input_size = 16;
  cfg.batch_size = 8;
  cfg.max_epochs = 10;
  cfg.lr_start = 1e-2;
  cfg.augment = false;
  cfg.seed = 11;
  cfg.bn_momentum = 0.8;
  return cfg;
}

}  // namespace

TEST(Trainer, StaircaseSchedule) {
  const TrainConfig cfg;
  EXPECT_EQ(lr_at(0, cfg), 1e-3);
  EXPECT_EQ(lr_at(999, cfg), 1e-3);
  EXPECT_EQ(lr_at(1000, cfg), 1e-4);
  EXPECT_EQ(lr_at(2000, cfg), 1e-5);
  EXPECT_EQ(lr_at(3000, cfg), 1e-6);
  EXPECT_EQ(lr_at(9999, cfg), 1e-6);
  EXPECT_EQ(lr_at(1000000, cfg), 1e-6);
}

TEST(Trainer, AdamMatchesHandComputedSteps) {
  auto p = scalar_store(1.0f);
  Adam adam;
  adam.step(p, scalar_grad(2.0f), 0.1);
  EXPECT_NEAR(p.at("w")[0], 0.9000000005, 1e-6);
  EXPECT_FLOAT_EQ(adam.first_moment("w")[0], 0.2f);
  EXPECT_FLOAT_EQ(adam.second_moment("w")[0], 0.004f);
  adam.step(p, scalar_grad(-1.0f), 0.1);
  EXPECT_NEAR(p.at("w")[0], 0.8733662967024315, 1e-6);
  EXPECT_EQ(adam.steps(), 2u);
  EXPECT_EQ(p.at("running")[0], 5.0f);
}

TEST(Trainer, AdamZeroGradientLeavesWeights) {
  auto p = scalar_store(0.25f);
  Adam adam;
  adam.step(p, scalar_grad(0.0f), 0.1);
  EXPECT_EQ(p.at("w")[0], 0.25f);
}

TEST(Trainer, SgdWithAndWithoutMomentum) {
  auto p = scalar_store(1.0f);
  Sgd plain;
  plain.step(p, scalar_grad(2.0f), 0.1);
  EXPECT_FLOAT_EQ(p.at("w")[0], 0.8f);

  auto q = scalar_store(1.0f);
  Sgd heavy(0.9);
  heavy.step(q, scalar_grad(2.0f), 0.1);
  heavy.step(q, scalar_grad(-1.0f), 0.1);
  EXPECT_NEAR(q.at("w")[0], 0.72, 1e-6);
}

TEST(Trainer, OptimizerRejectsBadGradients) {
  auto p = scalar_store(1.0f);
  Adam adam;
  EXPECT_THROW(adam.step(p, scalar_grad(std::numeric_limits<float>::quiet_NaN()), 0.1), NumericError);
  EXPECT_EQ(p.at("w")[0], 1.0f);
  EXPECT_EQ(adam.steps(), 0u);
  EXPECT_THROW(adam.step(p, {}, 0.1), ShapeError);
  nn::GradMap<float> wrong;
  wrong.emplace("w", nn::Tensor<float>({2}, 1.0f));
  EXPECT_THROW(Sgd().step(p, wrong, 0.1), ShapeError);
}

TEST(Trainer, EarlyStoppingTrace) {
  EarlyStopping es(3);
  const double trace[] = {0.8, 0.81, 0.81, 0.81, 0.81};
  std::size_t epochs = 0;
  for (double acc : trace) {
    es.update(acc);
    ++epochs;
    if (es.should_stop()) break;
  }
  EXPECT_EQ(epochs, 5u);
  EXPECT_EQ(es.best_epoch(), 2u);
  EXPECT_DOUBLE_EQ(es.best(), 0.81);

  EarlyStopping fresh(3);
  EXPECT_EQ(fresh.best_epoch(), 0u);
  EXPECT_FALSE(fresh.should_stop());
}

TEST(Trainer, ConfigRoundTrip) {
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.lr_start = 0.01;
  cfg.optimizer = OptimizerKind::sgd;
  cfg.momentum = 0.5;
  cfg.conv_activation = ActivationKind::mish;
  cfg.dense_activation = ActivationKind::pish;
  cfg.augmentation.rotation_degrees = 7.5;
  cfg.model = "mesoinception4";
  cfg.seed = 123456789012345ull;
  const auto back = parse_config(to_config_text(cfg));
  EXPECT_EQ(to_config_text(back), to_config_text(cfg));
  EXPECT_EQ(back.seed, cfg.seed);
  EXPECT_EQ(back.dense_activation, ActivationKind::pish);
  EXPECT_DOUBLE_EQ(back.augmentation.rotation_degrees, 7.5);
}

TEST(Trainer, ConfigParsing) {
  const auto cfg = parse_config("# comment\n\n  lr_step = 1e3 \nbatch_size=10 # trailing\naugment = off\n");
  EXPECT_EQ(cfg.lr_step, 1000u);
  EXPECT_EQ(cfg.batch_size, 10u);
  EXPECT_FALSE(cfg.augment);

  EXPECT_THROW(parse_config("nonsense = 1"), ConfigError);
  EXPECT_THROW(parse_config("batch_size"), ConfigError);
  EXPECT_THROW(parse_config("batch_size = ten"), ConfigError);
  EXPECT_THROW(parse_config("batch_size = 0"), ConfigError);
  EXPECT_THROW(parse_config("conv_activation = tanh"), ConfigError);
  EXPECT_THROW(parse_config("lr_start = 1e-9"), ConfigError);
  EXPECT_THROW(parse_config("val_fraction = 1"), ConfigError);
  EXPECT_THROW(parse_config("loss = cross_entropy"), ConfigError);
  try {
    parse_config("seed = 1\nbogus = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(load_config("/nonexistent/lowfake.cfg"), ConfigError);
}

TEST(Trainer, StageSchedules) {
  TrainConfig cfg;
  const auto s1 = stage_schedule(1, cfg);
  ASSERT_EQ(s1.size(), 36u);
  std::set<std::string> combos;
  for (const auto& r : s1) {
    combos.insert(r.combination());
    EXPECT_EQ(r.repetitions, 3u);
    EXPECT_DOUBLE_EQ(r.lr_start, cfg.lr_start);
  }
  EXPECT_EQ(combos.size(), 36u);
  EXPECT_EQ(s1.front().combination(), "relu+relu");

  const auto s2 = stage_schedule(2, cfg);
  ASSERT_EQ(s2.size(), 18u);
  EXPECT_EQ(s2[0].combination(), "relu+swish");
  EXPECT_DOUBLE_EQ(s2[0].lr_start, 1e-2);
  EXPECT_DOUBLE_EQ(s2[2].lr_start, 1e-4);
  EXPECT_EQ(s2[17].combination(), "relu+leaky_relu");

  const auto s3 = stage_schedule(3, cfg);
  ASSERT_EQ(s3.size(), 5u);
  for (const auto& r : s3) EXPECT_EQ(r.repetitions, 5u);
  EXPECT_EQ(s3[3].combination(), "mish+mish");
  EXPECT_DOUBLE_EQ(s3[3].lr_start, 1e-2);

  cfg.repetitions = 1;
  EXPECT_EQ(stage_schedule(3, cfg)[0].repetitions, 1u);
  EXPECT_THROW(stage_schedule(4, cfg), ConfigError);

  std::ostringstream out;
  write_schedule_csv(out, s3);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "run,combination,lr_start,repetitions");
  EXPECT_NE(out.str().find("0,swish+mish,0.001,5\n"), std::string::npos);
}

TEST(Trainer, BuildModelGeometry) {
  TrainConfig cfg;
  EXPECT_EQ(build_model(cfg).input_shape, (nn::Shape{256, 256, 3}));
  cfg.input_size = 16;
  EXPECT_EQ(build_model(cfg).input_shape, (nn::Shape{16, 16, 3}));
  cfg.input_size = 24;
  EXPECT_THROW(build_model(cfg), ConfigError);
  cfg.input_size = 64;
  cfg.model = "depthnet";
  EXPECT_THROW(build_model(cfg), ConfigError);
}

TEST(Trainer, ZeroEpochsReturnsInitialization) {
  auto cfg = small_config();
  cfg.max_epochs = 0;
  const auto graph = build_model(cfg);
  const auto ds = brightness_set(8, 1);
  const auto r = train(graph, ds, ds, cfg);
  EXPECT_TRUE(r.history.empty());
  EXPECT_EQ(r.best_epoch, 0u);
  EXPECT_EQ(r.steps, 0u);
  const auto init = nn::ParameterStore<float>::initialize(graph, derive_seed(cfg.seed, 0));
  ASSERT_EQ(r.params.entries().size(), init.entries().size());
  for (std::size_t i = 0; i < init.entries().size(); ++i) {
    EXPECT_EQ(r.params.entries()[i].value, init.entries()[i].value);
  }
}

TEST(Trainer, LearnsBrightnessAndIsDeterministic) {
  auto cfg = small_config();
  cfg.augment = true;
  const auto graph = build_model(cfg);
  const auto train_set = brightness_set(48, 2);
  const auto val_set = brightness_set(16, 3);
  std::size_t callbacks = 0;
  const auto a = train(graph, train_set, val_set, cfg, [&](const EpochStats&) { ++callbacks; });
  EXPECT_EQ(callbacks, a.history.size());
  EXPECT_GE(a.best_val_acc, 0.9);
  EXPECT_EQ(a.steps, a.history.size() * 6);
  EXPECT_EQ(a.history[a.best_epoch - 1].val_acc, a.best_val_acc);
  EXPECT_DOUBLE_EQ(dataset_accuracy(graph, a.params, val_set, 5), a.best_val_acc);

  const auto b = train(graph, train_set, val_set, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].val_acc, b.history[i].val_acc);
  }
  for (std::size_t i = 0; i < a.params.entries().size(); ++i) {
    EXPECT_EQ(a.params.entries()[i].value, b.params.entries()[i].value);
  }

  std::ostringstream hist;
  write_history_csv(hist, a.history);
  EXPECT_EQ(hist.str().rfind("epoch,train_loss,train_acc,val_acc,lr,seconds\n", 0), 0u);
}

TEST(Trainer, RejectsMismatchedData) {
  auto cfg = small_config();
  const auto graph = build_model(cfg);
  data::InMemoryDataset gray({16, 16, 1});
  gray.add(std::vector<float>(256, 0.5f), 0);
  EXPECT_THROW(train(graph, gray, gray, cfg), ShapeError);
  data::InMemoryDataset empty({16, 16, 3});
  EXPECT_THROW(train(graph, empty, empty, cfg), ConfigError);
}

TEST(Trainer, GridRowFormat) {
  std::ostringstream out;
  write_grid_row(out, {"relu+mish", 0.001, 7, 0.75, 4, std::nullopt});
  write_grid_row(out, {"mish+mish", 0.01, 8, 0.5, 2, 0.625});
  EXPECT_EQ(out.str(), "relu+mish,0.001,7,0.75,4,\nmish+mish,0.01,8,0.5,2,0.625\n");
}

TEST(Trainer, StageThreeGridOnTinyScenes) {
  auto cfg = small_config();
  cfg.max_epochs = 1;
  cfg.repetitions = 1;
  cfg.val_fraction = 0.25;
  const auto ds = brightness_set(32, 4);
  std::vector<data::SampleRecord> records;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    records.push_back({"img" + std::to_string(i), ds.label(i) ? data::Label::fake : data::Label::pristine,
                       "s" + std::to_string(i / 2)});
  }
  std::ostringstream csv;
  const auto rows = run_stage_grid(3, cfg, ds, records, &csv);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.test_acc.has_value());
    EXPECT_EQ(r.seed, derive_seed(cfg.seed, 0));
    EXPECT_EQ(r.epochs, 1u);
  }
  EXPECT_EQ(csv.str().rfind(std::string(kGridCsvHeader) + "\n", 0), 0u);
  EXPECT_THROW(run_stage_grid(3, cfg, ds, std::span(records).first(3), nullptr), ConfigError);
}
