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

#include "lowfake/models.hpp"
#include "lowfake/nn/forward.hpp"
#include "lowfake/nn/gradcheck.hpp"
#include "lowfake/nn/ops.hpp"

using namespace lowfake;
using namespace lowfake::nn;
using namespace lowfake::models;

namespace {

std::size_t tally(const std::vector<LayerSpec>& layers, LayerKind kind) {
  std::size_t n = 0;
  for (const auto& l : layers) {
    if (l.kind == kind) ++n;
    for (const auto& br : l.branches) n += tally(br, kind);
  }
  return n;
}

}  // namespace

TEST(Meso4, ParameterCountMatchesHandTally) {
  // conv weights + bias, BN gamma/beta (running stats excluded), dense head.
  const std::size_t by_hand = (3 * 3 * 3 * 8 + 8) + 16 + (5 * 5 * 8 * 8 + 8) + 16 + (5 * 5 * 8 * 16 + 16) + 32 +
                              (5 * 5 * 16 * 16 + 16) + 32 + (1024 * 16 + 16) + 17;
  ASSERT_EQ(by_hand, 27977u);
  for (ActivationKind a : kStudyActivations) {
    for (ActivationKind b : kStudyActivations) {
      EXPECT_EQ(count_params(build_meso4(a, b)), kMeso4Params);
    }
  }
}

TEST(Meso4, LayerStructure) {
  const ModelGraph g = build_meso4(ActivationKind::pish, ActivationKind::mish);
  EXPECT_EQ(g.input_shape, (Shape{256, 256, 3}));
  EXPECT_EQ(g.output_shape, (Shape{1}));
  EXPECT_EQ(tally(g.layers, LayerKind::conv2d), 4u);
  EXPECT_EQ(tally(g.layers, LayerKind::batchnorm), 4u);
  EXPECT_EQ(tally(g.layers, LayerKind::maxpool), 4u);
  EXPECT_EQ(tally(g.layers, LayerKind::dense), 2u);
  EXPECT_EQ(tally(g.layers, LayerKind::dropout), 2u);
  EXPECT_EQ(tally(g.layers, LayerKind::sigmoid), 1u);
  std::size_t conv_acts = 0, dense_acts = 0;
  for (const auto& l : g.layers) {
    if (l.kind != LayerKind::activation) continue;
    if (l.activation == ActivationKind::pish) ++conv_acts;
    if (l.activation == ActivationKind::mish) ++dense_acts;
  }
  EXPECT_EQ(conv_acts, 4u);
  EXPECT_EQ(dense_acts, 1u);
  // 8x8x16 features reach the dense head.
  for (const auto& l : g.layers) {
    if (l.kind == LayerKind::flatten) {
      EXPECT_EQ(l.output_shape, (Shape{1024}));
    }
  }
  EXPECT_EQ(count_trainable_tensors(g), 4u * 4u + 4u);
}

TEST(MesoInception4, CandidateWidthsReachPublishedCount) {
  EXPECT_EQ(mesoinception4_param_count(kInceptionCandidate), kMesoInception4Params);
  EXPECT_EQ(reconcile_inception_widths(), kInceptionCandidate);
  EXPECT_EQ(default_inception_widths(), kInceptionCandidate);
  for (ActivationKind a : kStudyActivations) {
    EXPECT_EQ(count_params(build_mesoinception4(a, ActivationKind::relu)), kMesoInception4Params);
  }
}

TEST(MesoInception4, ClosedFormAgreesWithBuiltGraph) {
  const MesoInceptionWidths probes[] = {{{1, 1, 1, 1}, {1, 1, 1, 1}}, {{2, 3, 1, 4}, {4, 1, 2, 3}},
                                        {{8, 8, 8, 8}, {8, 8, 8, 8}}};
  for (const auto& w : probes) {
    EXPECT_EQ(mesoinception4_param_count(w),
              count_params(build_mesoinception4(ActivationKind::relu, ActivationKind::relu, {}, w)));
  }
}

TEST(MesoInception4, SearchFallsBackToEnumeration) {
  const MesoInceptionWidths other{{1, 1, 1, 1}, {1, 1, 1, 1}};
  const std::size_t target = mesoinception4_param_count(other);
  const auto found = reconcile_inception_widths(target);
  EXPECT_EQ(mesoinception4_param_count(found), target);
  EXPECT_THROW(reconcile_inception_widths(3), ConfigError);
}

TEST(MesoInception4, StructureAndOutput) {
  const ModelGraph g = build_mesoinception4(ActivationKind::swish, ActivationKind::mish);
  EXPECT_EQ(tally(g.layers, LayerKind::concat), 2u);
  EXPECT_EQ(tally(g.layers, LayerKind::conv2d), 2u * 7u + 2u);
  auto params = ParameterStore<float>::initialize(g, 5);
  const auto y = predict(g, params, Tensor<float>({1, 256, 256, 3}, 0.0f));
  ASSERT_EQ(y.shape(), (Shape{1, 1}));
  EXPECT_GT(y[0], 0.0f);
  EXPECT_LT(y[0], 1.0f);
}

TEST(MesoInception4, GradientCheckOnTinyGeometry) {
  const ModelGraph g = build_mesoinception4(ActivationKind::pish, ActivationKind::mish, {16, 2});
  auto params = ParameterStore<double>::initialize(g, 3);
  Rng rng(4);
  Tensor<double> x({2, 16, 16, 3});
  for (double& v : x) v = uniform(rng, 0.0, 1.0);
  const auto r = check_network_gradients(g, params, x, 5);
  EXPECT_LT(r.max_error, 1e-6) << r.worst_parameter << "[" << r.worst_index << "]";
}

TEST(Meso4, ZeroImageGivesProbability) {
  for (ActivationKind a : kStudyActivations) {
    const ModelGraph g = build_meso4(a, a);
    auto params = ParameterStore<float>::initialize(g, 11);
    const auto y = predict(g, params, Tensor<float>({1, 256, 256, 3}, 0.0f));
    EXPECT_GT(y[0], 0.0f) << to_string(a);
    EXPECT_LT(y[0], 1.0f) << to_string(a);
  }
}

TEST(DepthNet, StructureAndIncrement) {
  const std::size_t base = count_params(build_depth_net(1, ActivationKind::relu));
  for (std::size_t n = 2; n <= 8; ++n) {
    const ModelGraph g = build_depth_net(n, ActivationKind::mish);
    EXPECT_EQ(count_params(g), base + (n - 1) * (500 * 500 + 500 + 2 * 500));
    EXPECT_EQ(tally(g.layers, LayerKind::dense), n + 1);
    EXPECT_EQ(tally(g.layers, LayerKind::batchnorm), n);
    EXPECT_EQ(g.output_shape, (Shape{10}));
  }
  EXPECT_THROW(build_depth_net(0, ActivationKind::relu), ConfigError);
  EXPECT_THROW(build_depth_net(kMaxDepthNetHidden + 1, ActivationKind::relu), ConfigError);
  const ModelGraph g = build_depth_net(3, ActivationKind::pish);
  auto params = ParameterStore<float>::initialize(g, 1);
  Tensor<float> x({4, 28, 28, 1}, 0.5f);
  const auto y = predict(g, params, x);
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < 10; ++c) s += y[i * 10 + c];
    EXPECT_NEAR(s, 1.0, 1e-5);
  }
}

TEST(ModelName, RoundTrip) {
  for (ModelName m : {ModelName::meso4, ModelName::mesoinception4, ModelName::depthnet}) {
    EXPECT_EQ(parse_model_name(to_string(m)), m);
  }
  EXPECT_THROW(parse_model_name("resnet"), ConfigError);
}

TEST(BatchNorm, TrainOutputHasZeroMeanUnitVariance) {
  Rng rng(3);
  Tensor<double> x({64, 3});
  for (double& v : x) v = uniform(rng, -40.0, 60.0);  // variance >> eps
  Tensor<double> gamma({3}, 1.0), beta({3}, 0.0);
  BatchNormCache<double> cache;
  const auto y = batchnorm_train(x, gamma, beta, cache);
  for (std::size_t c = 0; c < 3; ++c) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < 64; ++i) m += y[i * 3 + c];
    m /= 64;
    for (std::size_t i = 0; i < 64; ++i) v += (y[i * 3 + c] - m) * (y[i * 3 + c] - m);
    v /= 64;
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR(v, 1.0, 1e-5);
  }
}

TEST(MaxPool, RoutesGradientToFirstMaximum) {
  Tensor<double> x({1, 2, 2, 1}, std::vector<double>{3, 7, 7, 1});
  std::vector<std::uint32_t> argmax;
  const auto y = maxpool_forward(x, 2, argmax);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0], 7.0);
  const auto g = maxpool_backward(x.shape(), argmax, Tensor<double>({1, 1, 1, 1}, 5.0));
  EXPECT_EQ(g, (Tensor<double>({1, 2, 2, 1}, std::vector<double>{0, 5, 0, 0})));
}
