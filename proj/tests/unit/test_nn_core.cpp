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

#include "lowfake/models.hpp"
#include "lowfake/nn/forward.hpp"
#include "lowfake/nn/gradcheck.hpp"
#include "lowfake/nn/loss.hpp"
#include "lowfake/nn/ops.hpp"

using namespace lowfake;
using namespace lowfake::nn;

namespace {

template <typename T>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor<T> t(std::move(shape));
  for (T& v : t) v = static_cast<T>(uniform(rng, lo, hi));
  return t;
}

void expect_gradcheck(const ModelGraph& g, std::size_t batch, std::uint64_t seed, double tol = 1e-6) {
  auto params = ParameterStore<double>::initialize(g, seed);
  // Random non-trivial biases / BN affine terms so no gradient is structurally zero.
  Rng rng(seed + 7);
  for (auto& e : params.entries()) {
    if (e.trainable && e.value.rank() == 1) {
      for (double& v : e.value) v += uniform(rng, -0.3, 0.3);
    }
  }
  Shape in{batch};
  in.insert(in.end(), g.input_shape.begin(), g.input_shape.end());
  const auto x = random_tensor<double>(in, seed + 1);
  const NetworkGradCheck r = check_network_gradients(g, params, x, seed + 2);
  EXPECT_GT(r.checked, 0u);
  EXPECT_LT(r.max_error, tol) << g.name << ": worst " << r.worst_parameter << "[" << r.worst_index
                              << "] analytic=" << r.worst_analytic << " numeric=" << r.worst_numeric;
}

}  // namespace

TEST(Tensor, RejectsInconsistentData) {
  EXPECT_THROW(Tensor<float>({2, 2}, std::vector<float>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor<float>({2, 0}), ShapeError);
  Tensor<float> t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_THROW(t.reshape({4}), ShapeError);
}

TEST(Forward, IdentityGraph) {
  ModelGraph g = GraphBuilder("identity", {3}).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<float>::initialize(g, 1);
  Rng rng(1);
  Tensor<float> x({1, 3}, std::vector<float>{1, 2, 3});
  auto r = forward(g, params, x, Mode::train, rng);
  EXPECT_EQ(r.output, x);
  EXPECT_EQ(predict(g, params, x), x);
}

TEST(Forward, ZeroDenseGivesZeroOutput) {
  ModelGraph g = GraphBuilder("dense", {5}).dense("d", 4).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<float>::zeros(g);
  const auto x = random_tensor<float>({3, 5}, 9, -10, 10);
  const auto y = predict(g, params, x);
  EXPECT_EQ(y.shape(), (Shape{3, 4}));
  for (float v : y) EXPECT_EQ(v, 0.0f);
}

TEST(Forward, Meso4OutputShape) {
  ModelGraph g = models::build_meso4(ActivationKind::relu, ActivationKind::leaky_relu);
  auto params = ParameterStore<float>::initialize(g, 3);
  const auto x = random_tensor<float>({2, 256, 256, 3}, 4, 0, 1);
  Rng rng(5);
  auto r = forward(g, params, x, Mode::train, rng);
  EXPECT_EQ(r.output.shape(), (Shape{2, 1}));
  EXPECT_EQ(predict(g, params, x).shape(), (Shape{2, 1}));
}

TEST(Forward, InputShapeMismatchThrows) {
  ModelGraph g = GraphBuilder("dense", {5}).dense("d", 4).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<float>::initialize(g, 1);
  Rng rng(1);
  EXPECT_THROW(forward(g, params, Tensor<float>({2, 6}), Mode::train, rng), ShapeError);
  EXPECT_THROW(predict(g, params, Tensor<float>({5})), ShapeError);
}

TEST(Forward, NonFiniteValuesAreHardErrors) {
  ModelGraph g = GraphBuilder("dense", {2}).dense("d", 2).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<float>::initialize(g, 1);
  Rng rng(1);
  Tensor<float> x({1, 2}, std::vector<float>{1.0f, std::numeric_limits<float>::quiet_NaN()});
  EXPECT_THROW(forward(g, params, x, Mode::train, rng), NumericError);
  params.at("d/kernel")[0] = std::numeric_limits<float>::max();
  Tensor<float> big({1, 2}, std::vector<float>{1e30f, 1e30f});
  EXPECT_THROW(predict(g, params, big), NumericError);
}

TEST(Backward, LinearCase) {
  // f(w) = w * x with x = 3, bias fixed at 0.
  ModelGraph g = GraphBuilder("lin", {1}).dense("d", 1).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<double>::zeros(g);
  params.at("d/kernel")[0] = 0.7;
  Rng rng(1);
  auto r = forward(g, params, Tensor<double>({1, 1}, std::vector<double>{3.0}), Mode::train, rng);
  auto grads = backward(r.tape, Tensor<double>({1, 1}, 1.0));
  EXPECT_DOUBLE_EQ(grads.at("d/kernel")[0], 3.0);
  EXPECT_DOUBLE_EQ(grads.at("d/bias")[0], 1.0);
}

TEST(Backward, SquareViaFanOutAccumulates) {
  // f(w) = w * w recorded as one parameter value feeding both inputs of a product.
  const double w = 1.0;
  GradTape<double> tape;
  tape.register_parameter("w", {1});
  const auto wid = tape.new_value({1}, true);
  tape.record("param:w", {}, wid, [](const Tensor<double>& gy, const std::vector<bool>&, GradMap<double>& pg) {
    pg.at("w")[0] += gy[0];
    return std::vector<Tensor<double>>{};
  });
  const auto out = tape.new_value({1}, true);
  tape.record("mul", {wid, wid}, out, [w](const Tensor<double>& gy, const std::vector<bool>&, GradMap<double>&) {
    std::vector<Tensor<double>> g;
    g.emplace_back(Shape{1}, gy[0] * w);
    g.emplace_back(Shape{1}, gy[0] * w);
    return g;
  });
  tape.set_output(out);
  auto grads = backward(tape, Tensor<double>({1}, 1.0));
  EXPECT_DOUBLE_EQ(grads.at("w")[0], 2.0);
}

TEST(Backward, ReverseOrderAndOneGradientPerParameter) {
  ModelGraph g = models::build_meso4(ActivationKind::relu, ActivationKind::relu, {16, 2});
  auto params = ParameterStore<double>::initialize(g, 1);
  Rng rng(2);
  auto r = forward(g, params, random_tensor<double>({2, 16, 16, 3}, 3), Mode::train, rng);
  const auto& nodes = r.tape.nodes();
  ASSERT_FALSE(nodes.empty());
  for (std::size_t i = 1; i < nodes.size(); ++i) EXPECT_LT(nodes[i - 1].output, nodes[i].output);
  auto grads = backward(r.tape, Tensor<double>(r.output.shape(), 1.0));
  EXPECT_EQ(grads.size(), count_trainable_tensors(g));
  for (const auto& e : params.entries()) {
    if (!e.trainable) {
      EXPECT_FALSE(grads.contains(e.name));
      continue;
    }
    ASSERT_TRUE(grads.contains(e.name)) << e.name;
    EXPECT_EQ(grads.at(e.name).shape(), e.value.shape());
  }
}

TEST(Backward, ConsumedAndEvalTapesAreRejected) {
  ModelGraph g = GraphBuilder("d", {2}).dense("d", 1).build(ActivationKind::relu, ActivationKind::relu);
  auto params = ParameterStore<double>::initialize(g, 1);
  Rng rng(1);
  auto r = forward(g, params, Tensor<double>({1, 2}, 1.0), Mode::train, rng);
  EXPECT_THROW(backward(r.tape, Tensor<double>({2, 1}, 1.0)), ShapeError);
  backward(r.tape, Tensor<double>({1, 1}, 1.0));
  EXPECT_THROW(backward(r.tape, Tensor<double>({1, 1}, 1.0)), ConfigError);
  auto e = forward(g, params, Tensor<double>({1, 2}, 1.0), Mode::eval, rng);
  EXPECT_THROW(backward(e.tape, Tensor<double>({1, 1}, 1.0)), ConfigError);
}

TEST(GradCheck, TinyConvConvDenseNet) {
  ModelGraph g = GraphBuilder("tiny", {8, 8, 2})
                     .conv2d("c1", 3, 3)
                     .activation(ActivationKind::swish)
                     .conv2d("c2", 2, 3)
                     .activation(ActivationKind::pish)
                     .flatten()
                     .dense("d", 3)
                     .build(ActivationKind::swish, ActivationKind::pish);
  expect_gradcheck(g, 2, 11);
}

TEST(GradCheck, EveryLayerKind) {
  expect_gradcheck(GraphBuilder("conv_d1", {6, 6, 2}).conv2d("c", 3, 3).build({}, {}), 2, 21);
  expect_gradcheck(GraphBuilder("conv_d2", {7, 7, 2}).conv2d("c", 2, 3, 2).build({}, {}), 2, 22);
  expect_gradcheck(GraphBuilder("conv_d3", {8, 8, 1}).conv2d("c", 2, 3, 3).build({}, {}), 2, 23);
  expect_gradcheck(GraphBuilder("conv_1x1", {4, 4, 3}).conv2d("c", 2, 1).build({}, {}), 2, 24);
  expect_gradcheck(GraphBuilder("conv_5x5", {6, 6, 2}).conv2d("c", 2, 5).build({}, {}), 1, 25);
  expect_gradcheck(GraphBuilder("bn_image", {4, 4, 3}).conv2d("c", 2, 3).batchnorm("bn").build({}, {}), 3, 26);
  expect_gradcheck(GraphBuilder("bn_flat", {5}).dense("d", 4).batchnorm("bn").dense("o", 2).build({}, {}), 6, 27);
  expect_gradcheck(GraphBuilder("pool", {4, 4, 2}).conv2d("c", 2, 3).maxpool(2).build({}, {}), 2, 28);
  expect_gradcheck(GraphBuilder("dense", {7}).dense("d", 3).build({}, {}), 4, 29);
  expect_gradcheck(GraphBuilder("dropout", {6}).dense("d", 8).dropout(0.5).dense("o", 2).build({}, {}), 3, 30);
  expect_gradcheck(GraphBuilder("sigmoid", {4}).dense("d", 1).sigmoid().build({}, {}), 5, 31);
  expect_gradcheck(GraphBuilder("softmax", {4}).dense("d", 3).softmax().build({}, {}), 5, 32);
  expect_gradcheck(GraphBuilder("concat", {5, 5, 2})
                       .concat({[](GraphBuilder& b) { b.conv2d("b1", 1, 1); },
                                [](GraphBuilder& b) { b.conv2d("b2r", 2, 1).conv2d("b2", 2, 3, 2); }})
                       .flatten()
                       .dense("o", 2)
                       .build({}, {}),
                   2, 33);
  for (ActivationKind kind : kGridActivations) {
    expect_gradcheck(GraphBuilder("act", {6}).dense("d", 5).activation(kind).dense("o", 2).build(kind, kind), 3,
                     40 + static_cast<int>(kind));
  }
}

TEST(GradCheck, SinglePrecisionWithinLooseTolerance) {
  ModelGraph g = GraphBuilder("tiny", {6, 6, 2})
                     .conv2d("c1", 3, 3)
                     .activation(ActivationKind::mish)
                     .flatten()
                     .dense("d", 2)
                     .build(ActivationKind::mish, ActivationKind::mish);
  auto params = ParameterStore<float>::initialize(g, 5);
  const auto x = random_tensor<float>({2, 6, 6, 2}, 6);
  Rng proj(7);
  Rng rng(8);
  auto r = forward(g, params, x, Mode::train, rng);
  Tensor<float> R(r.output.shape());
  for (float& v : R) v = static_cast<float>(normal(proj));
  auto grads = backward(r.tape, R);
  auto objective = [&]() {
    Rng rr(8);
    auto o = forward(g, params, x, Mode::train, rr);
    double s = 0;
    for (std::size_t i = 0; i < o.output.size(); ++i) s += static_cast<double>(o.output[i]) * R[i];
    return s;
  };
  double worst = 0;
  const float h = 1e-2f;
  for (auto& e : params.entries()) {
    for (std::size_t i = 0; i < e.value.size(); ++i) {
      const float saved = e.value[i];
      e.value[i] = saved + h;
      const double up = objective();
      e.value[i] = saved - h;
      const double down = objective();
      e.value[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = grads.at(e.name)[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-2}));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(Determinism, TrainForwardIsBitIdenticalUnderSameSeed) {
  ModelGraph g = models::build_meso4(ActivationKind::pish, ActivationKind::mish, {16, 2});
  auto p1 = ParameterStore<float>::initialize(g, 42);
  auto p2 = ParameterStore<float>::initialize(g, 42);
  const auto x = random_tensor<float>({3, 16, 16, 3}, 43);
  Rng r1(44), r2(44);
  auto a = forward(g, p1, x, Mode::train, r1);
  auto b = forward(g, p2, x, Mode::train, r2);
  EXPECT_EQ(a.output, b.output);
  auto ga = backward(a.tape, Tensor<float>(a.output.shape(), 1.0f));
  auto gb = backward(b.tape, Tensor<float>(b.output.shape(), 1.0f));
  for (const auto& [name, t] : ga) EXPECT_EQ(t, gb.at(name)) << name;
}

TEST(EvalMode, PureAndDropoutFree) {
  ModelGraph g = models::build_meso4(ActivationKind::relu, ActivationKind::leaky_relu, {16, 2});
  auto params = ParameterStore<float>::initialize(g, 1);
  const auto x = random_tensor<float>({4, 16, 16, 3}, 2);
  Rng rng(3);
  forward(g, params, x, Mode::train, rng);  // move running stats away from their init
  const auto before = params;
  auto a = forward(g, params, x, Mode::eval, rng);
  auto b = forward(g, params, x, Mode::eval, rng);
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(predict(g, params, x), a.output);
  for (std::size_t i = 0; i < params.entries().size(); ++i) {
    EXPECT_EQ(params.entries()[i].value, before.entries()[i].value) << params.entries()[i].name;
  }
}

TEST(TrainMode, UpdatesBatchNormRunningStatistics) {
  ModelGraph g = GraphBuilder("bn", {3}).batchnorm("bn").build({}, {});
  auto params = ParameterStore<double>::initialize(g, 1);
  Tensor<double> x({2, 3}, std::vector<double>{1, 2, 3, 3, 4, 5});
  Rng rng(1);
  forward(g, params, x, Mode::train, rng);
  // mean (2,3,4), biased var 1; momentum 0.99
  EXPECT_NEAR(params.at("bn/moving_mean")[0], 0.02, 1e-12);
  EXPECT_NEAR(params.at("bn/moving_mean")[2], 0.04, 1e-12);
  EXPECT_NEAR(params.at("bn/moving_variance")[1], 1.0, 1e-12);
}

TEST(FastActivations, FloatPathAgreesWithScalarReference) {
  const auto x = random_tensor<float>({20000}, 77, -30, 30);
  for (ActivationKind kind : kGridActivations) {
    const auto fast = activation_forward_with_grad(kind, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xd = x[i];
      const double v = activate(kind, xd);
      const double d = activate_grad(kind, xd);
      ASSERT_NEAR(fast.value[i], v, 2e-6 * std::max(1.0, std::abs(v))) << to_string(kind) << " x=" << xd;
      ASSERT_NEAR(fast.derivative[i], d, 2e-6 * std::max(1.0, std::abs(d))) << to_string(kind) << " x=" << xd;
    }
  }
}

TEST(Loss, BinaryAndCategorical) {
  Tensor<double> p({2, 1}, std::vector<double>{0.8, 0.25});
  const int labels[] = {1, 0};
  auto bce = compute_loss(LossKind::bce, p, labels);
  EXPECT_NEAR(bce.value, -(std::log(0.8) + std::log(0.75)) / 2, 1e-12);
  EXPECT_NEAR(bce.grad[0], (0.8 - 1) / (0.8 * 0.2) / 2, 1e-12);
  auto mse = compute_loss(LossKind::mse, p, labels);
  EXPECT_NEAR(mse.value, (0.04 + 0.0625) / 2, 1e-12);
  EXPECT_NEAR(accuracy(p, labels), 1.0, 0);

  Tensor<double> q({1, 3}, std::vector<double>{0.2, 0.5, 0.3});
  const int cls[] = {2};
  auto ce = compute_loss(LossKind::cross_entropy, q, cls);
  EXPECT_NEAR(ce.value, -std::log(0.3), 1e-12);
  EXPECT_EQ(accuracy(q, cls), 0.0);
  const int bad[] = {3};
  EXPECT_THROW(compute_loss(LossKind::cross_entropy, q, bad), ConfigError);
}
