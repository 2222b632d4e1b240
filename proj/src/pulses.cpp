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

#include "zzfree/pulses.hpp"

#include <array>
#include <cmath>

#include "zzfree/errors.hpp"
#include "zzfree/linalg.hpp"

namespace zzfree {

PulseEnvelope PulseEnvelope::truncated_gaussian(double peak, double sigma, double duration) {
  PulseEnvelope e;
  e.kind = PulseKind::TruncatedGaussian;
  e.amplitude = peak;
  e.sigma = sigma;
  e.duration = duration > 0 ? duration : 4.0 * sigma;
  e.validate();
  return e;
}

PulseEnvelope PulseEnvelope::adiabatic_poly(double base, int exponent, double duration) {
  PulseEnvelope e;
  e.kind = PulseKind::AdiabaticPoly;
  e.amplitude = base;
  e.exponent = exponent;
  e.duration = duration;
  e.validate();
  return e;
}

PulseEnvelope PulseEnvelope::constant(double level) {
  PulseEnvelope e;
  e.kind = PulseKind::Constant;
  e.amplitude = level;
  return e;
}

PulseEnvelope PulseEnvelope::ramp_up(double target, double ramp_time, int order, double hold) {
  PulseEnvelope e;
  e.kind = PulseKind::RampUp;
  e.amplitude = target;
  e.ramp_time = ramp_time;
  e.order = order;
  e.hold = hold;
  e.validate();
  return e;
}

void PulseEnvelope::validate() const {
  switch (kind) {
    case PulseKind::TruncatedGaussian:
      if (!(sigma > 0) || !(duration > 0)) throw ValidationError("gaussian: sigma and duration must be positive");
      break;
    case PulseKind::AdiabaticPoly:
      if (exponent < 2 || exponent % 2 != 0) throw ValidationError("adiabatic_poly: exponent must be even and >= 2");
      if (!(duration > 0)) throw ValidationError("adiabatic_poly: duration must be positive");
      break;
    case PulseKind::Constant:
      break;
    case PulseKind::RampUp:
      if (!(ramp_time > 0)) throw ValidationError("ramp_up: ramp_time must be positive");
      if (order != 1 && order != 3 && order != 5 && order != 7)
        throw ValidationError("ramp_up: smoothstep order must be 1, 3, 5 or 7");
      if (!(hold >= 0)) throw ValidationError("ramp_up: hold must be non-negative");
      break;
  }
}

double PulseEnvelope::support_end() const {
  switch (kind) {
    case PulseKind::TruncatedGaussian:
    case PulseKind::AdiabaticPoly:
      return duration;
    case PulseKind::Constant:
      return std::numeric_limits<double>::infinity();
    case PulseKind::RampUp:
      return 2.0 * ramp_time + hold;
  }
  return 0.0;
}

std::string PulseEnvelope::kind_name() const {
  switch (kind) {
    case PulseKind::TruncatedGaussian:
      return "truncated_gaussian";
    case PulseKind::AdiabaticPoly:
      return "adiabatic_poly";
    case PulseKind::Constant:
      return "constant";
    case PulseKind::RampUp:
      return "ramp_up";
  }
  return "";
}

namespace {

using Derivs = std::array<double, 3>;  // value, first, second derivative

// Smoothstep polynomials on u in [0, 1] with their u-derivatives.
Derivs smoothstep(int order, double u) {
  switch (order) {
    case 1:
      return {u, 1.0, 0.0};
    case 3:
      return {u * u * (3 - 2 * u), 6 * u * (1 - u), 6 - 12 * u};
    case 5:
      return {u * u * u * (10 + u * (-15 + 6 * u)), 30 * u * u * (1 + u * (-2 + u)),
              60 * u * (1 + u * (-3 + 2 * u))};
    default:
      return {u * u * u * u * (35 + u * (-84 + u * (70 - 20 * u))),
              140 * u * u * u * (1 + u * (-3 + u * (3 - u))), 420 * u * u * (1 + u * (-4 + u * (5 - 2 * u)))};
  }
}

Derivs shape(const PulseEnvelope &e, double t) {
  if (t < 0) throw ValidationError("pulse evaluated at negative time");
  const double a = e.amplitude;
  switch (e.kind) {
    case PulseKind::Constant:
      return {a, 0, 0};
    case PulseKind::TruncatedGaussian: {
      if (t > e.duration) return {0, 0, 0};
      const double x = t - 0.5 * e.duration, s2 = e.sigma * e.sigma;
      const double g = std::exp(-x * x / (2 * s2));
      double edge = 0.0, norm = 1.0;
      if (e.lifted) {
        edge = std::exp(-e.duration * e.duration / (8 * s2));
        norm = 1.0 / (1.0 - edge);
      }
      return {a * norm * (g - edge), -a * norm * x / s2 * g, a * norm * (x * x / (s2 * s2) - 1 / s2) * g};
    }
    case PulseKind::AdiabaticPoly: {
      if (t > e.duration) return {0, 0, 0};
      const double T = e.duration, u = t / T;
      const int n = e.exponent;
      Derivs p = smoothstep(5, u);
      const double s = p[0] - 0.5, s1 = p[1] / T, s2 = p[2] / (T * T);
      const double amp = a * std::ldexp(1.0, n);
      double v = amp * std::pow(s, n);
      double d1 = amp * n * std::pow(s, n - 1) * s1;
      double d2 = amp * n * ((n - 1) * std::pow(s, n - 2) * s1 * s1 + std::pow(s, n - 1) * s2);
      return {v, d1, d2};
    }
    case PulseKind::RampUp: {
      const double r = e.ramp_time;
      if (t < r) {
        Derivs p = smoothstep(e.order, t / r);
        return {a * p[0], a * p[1] / r, a * p[2] / (r * r)};
      }
      if (t <= r + e.hold) return {a, 0, 0};
      const double down = t - r - e.hold;
      if (down >= r) return {0, 0, 0};
      Derivs p = smoothstep(e.order, 1.0 - down / r);
      return {a * p[0], -a * p[1] / r, a * p[2] / (r * r)};
    }
  }
  return {0, 0, 0};
}

}  // namespace

double evaluate(const PulseEnvelope &env, double t) {
  Derivs d = shape(env, t);
  return env.derivative_weight != 0.0 ? env.derivative_weight * d[1] : d[0];
}

double derivative(const PulseEnvelope &env, double t) {
  Derivs d = shape(env, t);
  return env.derivative_weight != 0.0 ? env.derivative_weight * d[2] : d[1];
}

double second_derivative(const PulseEnvelope &env, double t) {
  if (env.derivative_weight != 0.0) throw ValidationError("third derivative of a DRAG quadrature is not available");
  return shape(env, t)[2];
}

std::pair<PulseEnvelope, PulseEnvelope> drag_pair(const PulseEnvelope &base, double eta) {
  if (eta == 0.0) throw ValidationError("DRAG requires nonzero anharmonicity");
  if (base.derivative_weight != 0.0) throw ValidationError("DRAG base must be a plain envelope");
  PulseEnvelope quad = base;
  quad.derivative_weight = -1.0 / (kTwoPi * eta);
  quad.phase = base.phase - 0.5 * std::numbers::pi;
  return {base, quad};
}

}  // namespace zzfree
