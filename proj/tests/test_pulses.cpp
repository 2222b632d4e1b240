// Copyright 2026 The zzfree Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "zzfree/errors.hpp"
#include "zzfree/linalg.hpp"
#include "zzfree/pulses.hpp"

using namespace zzfree;

TEST(Gaussian, LiftedEdgesVanishAndPeakIsKept) {
  auto g = PulseEnvelope::truncated_gaussian(0.2, 10.0, 40.0);
  EXPECT_NEAR(evaluate(g, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(evaluate(g, 40.0), 0.0, 1e-15);
  EXPECT_NEAR(evaluate(g, 20.0), 0.2, 1e-15);
  EXPECT_EQ(evaluate(g, 41.0), 0.0);
  g.lifted = false;
  EXPECT_NEAR(evaluate(g, 0.0), 0.2 * std::exp(-2.0), 1e-15);
}

TEST(Gaussian, DerivativeMatchesFiniteDifference) {
  auto g = PulseEnvelope::truncated_gaussian(0.3, 7.0, 28.0);
  for (double t : {3.0, 11.0, 19.5, 25.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(derivative(g, t), (evaluate(g, t + h) - evaluate(g, t - h)) / (2 * h), 1e-9);
    EXPECT_NEAR(second_derivative(g, t), (derivative(g, t + h) - derivative(g, t - h)) / (2 * h), 1e-8);
  }
}

TEST(AdiabaticPoly, EndpointsAndMidpoint) {
  for (int n : {2, 4, 8, 32}) {
    auto p = PulseEnvelope::adiabatic_poly(0.27, n, 150.0);
    EXPECT_NEAR(evaluate(p, 0.0), 0.27, 1e-14);
    EXPECT_NEAR(evaluate(p, 150.0), 0.27, 1e-14);
    EXPECT_NEAR(evaluate(p, 75.0), 0.0, 1e-14);
  }
}

TEST(AdiabaticPoly, SymmetricAndBounded) {
  auto p = PulseEnvelope::adiabatic_poly(0.27, 4, 120.0);
  for (int k = 0; k <= 120; ++k) {
    const double t = k * 1.0;
    EXPECT_NEAR(evaluate(p, t), evaluate(p, 120.0 - t), 1e-14);
    EXPECT_LE(std::abs(evaluate(p, t)), 0.27 + 1e-15);
    EXPECT_GE(evaluate(p, t), 0.0);
  }
}

TEST(AdiabaticPoly, DerivativesMatchFiniteDifference) {
  for (int n : {2, 6, 32}) {
    auto p = PulseEnvelope::adiabatic_poly(0.27, n, 110.0);
    for (double t : {7.0, 30.0, 55.5, 90.0}) {
      const double h = 1e-4;
      const double d1 = (evaluate(p, t + h) - evaluate(p, t - h)) / (2 * h);
      const double d2 = (derivative(p, t + h) - derivative(p, t - h)) / (2 * h);
      EXPECT_NEAR(derivative(p, t), d1, 1e-8 + 1e-6 * std::abs(d1)) << n << " " << t;
      EXPECT_NEAR(second_derivative(p, t), d2, 1e-8 + 1e-6 * std::abs(d2)) << n << " " << t;
    }
  }
}

TEST(AdiabaticPoly, EndpointDerivativesVanish) {
  for (int n : {2, 6, 32}) {
    auto p = PulseEnvelope::adiabatic_poly(0.27, n, 110.0);
    for (double t : {0.0, 110.0}) {
      EXPECT_LT(std::abs(derivative(p, t)), 1e-8) << n;
      EXPECT_LT(std::abs(second_derivative(p, t)), 1e-8) << n;
    }
    // Approaching the edges the first derivative falls off as t^2.
    EXPECT_LT(std::abs(derivative(p, 1e-3)), 1e-8);
    EXPECT_LT(std::abs(derivative(p, 110.0 - 1e-3)), 1e-8);
  }
}

TEST(AdiabaticPoly, RejectsOddExponent) {
  EXPECT_THROW(PulseEnvelope::adiabatic_poly(0.27, 3, 100.0), ValidationError);
  EXPECT_THROW(PulseEnvelope::adiabatic_poly(0.27, 2, 0.0), ValidationError);
}

TEST(RampUp, SmoothstepRampHoldAndReturn) {
  auto r = PulseEnvelope::ramp_up(0.27, 30.0, 5, 100.0);
  EXPECT_EQ(evaluate(r, 0.0), 0.0);
  EXPECT_NEAR(evaluate(r, 15.0), 0.135, 1e-15);
  EXPECT_NEAR(evaluate(r, 30.0), 0.27, 1e-15);
  EXPECT_NEAR(evaluate(r, 100.0), 0.27, 1e-15);
  EXPECT_NEAR(evaluate(r, 160.0), 0.0, 1e-15);
  EXPECT_EQ(r.support_end(), 160.0);
  double prev = -1.0;
  for (int k = 0; k <= 30; ++k) {
    EXPECT_GE(evaluate(r, k), prev);
    prev = evaluate(r, k);
  }
  EXPECT_THROW(PulseEnvelope::ramp_up(0.27, 30.0, 4), ValidationError);
}

TEST(Drag, QuadratureIsScaledDerivative) {
  auto g = PulseEnvelope::truncated_gaussian(0.05, 10.0, 40.0);
  const double eta = -0.32;
  auto [in, quad] = drag_pair(g, eta);
  for (double t : {5.0, 17.0, 33.0}) {
    EXPECT_EQ(evaluate(in, t), evaluate(g, t));
    EXPECT_NEAR(evaluate(quad, t), -derivative(g, t) / (kTwoPi * eta), 1e-15);
  }
  EXPECT_NEAR(in.phase - quad.phase, std::numbers::pi / 2, 1e-15);
  EXPECT_THROW(drag_pair(g, 0.0), ValidationError);
}

TEST(Envelope, NegativeTimeIsRejected) {
  EXPECT_THROW(evaluate(PulseEnvelope::constant(1.0), -1.0), ValidationError);
}
