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
#include <numbers>

#include "lowfake/activations.hpp"

using lowfake::ActivationKind;
using lowfake::activate;
using lowfake::activate_grad;

namespace {

// Long-double reference, evaluated directly from the definition.
long double pish_ref(long double x) {
  const long double softplus = std::log1p(std::exp(x));
  const long double sig = 1.0L / (1.0L + std::exp(-x));
  return x * std::atan(softplus + sig);
}

int derivative_sign_changes(ActivationKind kind, double lo, double hi, double step) {
  int changes = 0;
  double prev = activate_grad(kind, lo);
  for (double x = lo + step; x <= hi; x += step) {
    const double d = activate_grad(kind, x);
    if ((prev < 0) != (d < 0)) ++changes;
    prev = d;
  }
  return changes;
}

}  // namespace

TEST(Activations, ZeroAndNegativeCases) {
  EXPECT_EQ(activate(ActivationKind::pish, 0.0), 0.0);
  EXPECT_EQ(activate(ActivationKind::mish, 0.0), 0.0);
  EXPECT_EQ(activate(ActivationKind::swish, 0.0), 0.0);
  EXPECT_EQ(activate(ActivationKind::relu, -5.0), 0.0);
  EXPECT_DOUBLE_EQ(activate(ActivationKind::leaky_relu, -1.0), -0.1);
  EXPECT_DOUBLE_EQ(activate(ActivationKind::leaky_relu, 2.0), 2.0);
}

TEST(Activations, PishAtOneMatchesHighPrecisionOracle) {
  // 40-digit evaluation: 1.115858145240626157996...
  constexpr double kPishOne = 1.1158581452406262;
  EXPECT_NEAR(activate(ActivationKind::pish, 1.0), kPishOne, 1e-15);
  EXPECT_NEAR(static_cast<double>(pish_ref(1.0L)), kPishOne, 1e-15);
  for (double x : {-7.5, -1.33, -0.2, 0.3, 2.5, 9.0}) {
    EXPECT_NEAR(activate(ActivationKind::pish, x), static_cast<double>(pish_ref(x)), 1e-14) << x;
  }
}

TEST(Activations, OtherKindsMatchHighPrecisionValues) {
  // 40-digit evaluations at x = 1.
  EXPECT_NEAR(activate(ActivationKind::mish, 1.0), 0.8650983882673103, 1e-15);
  EXPECT_NEAR(activate(ActivationKind::swish, 1.0), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(activate_grad(ActivationKind::mish, 1.0), 1.0490362200997922, 1e-14);
  EXPECT_NEAR(activate_grad(ActivationKind::swish, 1.0), 0.9276705118714867, 1e-14);
  EXPECT_NEAR(activate_grad(ActivationKind::pish, 1.0), 1.2949712107699161, 1e-14);
}

TEST(Activations, PishGradAtZero) {
  // arctan(ln 2 + 1/2), confirmed by central differences.
  const double expected = std::atan(std::log(2.0) + 0.5);
  EXPECT_NEAR(expected, 0.8732400280655822, 1e-15);
  EXPECT_NEAR(activate_grad(ActivationKind::pish, 0.0), expected, 1e-15);
  const double h = 1e-6;
  const double fd = (activate(ActivationKind::pish, h) - activate(ActivationKind::pish, -h)) / (2 * h);
  EXPECT_NEAR(fd, expected, 1e-9);
}

TEST(Activations, PiecewiseLinearGradients) {
  EXPECT_EQ(activate_grad(ActivationKind::relu, 3.0), 1.0);
  EXPECT_EQ(activate_grad(ActivationKind::relu, -3.0), 0.0);
  EXPECT_EQ(activate_grad(ActivationKind::relu, 0.0), 1.0);
  EXPECT_EQ(activate_grad(ActivationKind::leaky_relu, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(activate_grad(ActivationKind::leaky_relu, -2.0), 0.1);
}

TEST(Activations, FiniteDifferenceSweepAllKinds) {
  for (ActivationKind kind : lowfake::kGridActivations) {
    const auto r = lowfake::check_activation_gradient(kind, 1000, -8.0, 8.0, 2024);
    EXPECT_EQ(r.points, 1000u);
    EXPECT_LT(r.max_error, 1e-9) << lowfake::to_string(kind) << " worst x=" << r.worst_x;
  }
}

TEST(Activations, NonFiniteInputThrows) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (ActivationKind kind : lowfake::kStudyActivations) {
    EXPECT_THROW(activate(kind, nan), lowfake::NumericError);
    EXPECT_THROW(activate_grad(kind, inf), lowfake::NumericError);
  }
}

TEST(Activations, ExtremeArgumentsStayFinite) {
  for (ActivationKind kind : lowfake::kGridActivations) {
    for (double x : {-1e4, -700.0, -21.0, 21.0, 700.0, 1e4}) {
      EXPECT_TRUE(std::isfinite(activate(kind, x))) << lowfake::to_string(kind) << " " << x;
      EXPECT_TRUE(std::isfinite(activate_grad(kind, x))) << lowfake::to_string(kind) << " " << x;
    }
  }
}

TEST(Pish, ExtremumMatchesGridScan) {
  // Grid oracle, step 1e-5 over [-5, 0].
  double best_x = 0.0, best_f = 0.0;
  for (long i = 0; i <= 500000; ++i) {
    const double x = -5.0 + 1e-5 * static_cast<double>(i);
    const double f = activate(ActivationKind::pish, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  EXPECT_NEAR(best_x, -1.33334, 1e-4);
  EXPECT_NEAR(best_f, -0.5555451513, 1e-9);

  const auto e = lowfake::pish_extremum();
  EXPECT_NEAR(e.x_min, best_x, 2e-5);
  EXPECT_NEAR(e.f_min, best_f, 1e-9);
  EXPECT_GE(e.f_min, -0.57);
  EXPECT_LE(e.f_min, -0.54);
}

TEST(Pish, LowerBoundOnWideGrid) {
  double best_x = 0.0, best_f = 0.0;
  for (long i = 0; i <= 1000000; ++i) {
    const double x = -50.0 + 1e-4 * static_cast<double>(i);
    const double f = activate(ActivationKind::pish, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  EXPECT_GE(best_f, -0.57);
  EXPECT_LE(best_f, -0.54);
  EXPECT_GT(best_x, -2.0);
  EXPECT_LT(best_x, -1.0);
}

TEST(Pish, SignStructureAndTails) {
  for (double x = -9.99; x < 0.0; x += 0.01) EXPECT_LT(activate(ActivationKind::pish, x), 0.0) << x;
  for (double x = 0.01; x < 50.0; x += 0.01) EXPECT_GT(activate(ActivationKind::pish, x), 0.0) << x;
  EXPECT_LT(std::abs(activate(ActivationKind::pish, -20.0)), 1e-6);
  const double ratio = activate(ActivationKind::pish, 100.0) / 100.0;
  EXPECT_GE(ratio, 1.55);
  EXPECT_LE(ratio, std::numbers::pi / 2);
}

TEST(Activations, SmoothKindsAreNonMonotonicOnNegativeAxis) {
  for (ActivationKind kind : {ActivationKind::pish, ActivationKind::swish, ActivationKind::mish}) {
    EXPECT_GE(derivative_sign_changes(kind, -5.0, 0.0, 1e-3), 1) << lowfake::to_string(kind);
  }
}

TEST(Activations, NamesRoundTrip) {
  for (ActivationKind kind : lowfake::kGridActivations) {
    EXPECT_EQ(lowfake::parse_activation(lowfake::to_string(kind)), kind);
  }
  EXPECT_THROW(lowfake::parse_activation("gelu"), lowfake::ConfigError);
}
