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

#ifndef ZZFREE_PULSES_HPP
#define ZZFREE_PULSES_HPP

#include <limits>
#include <string>
#include <utility>

namespace zzfree {

enum class PulseKind { TruncatedGaussian, AdiabaticPoly, Constant, RampUp };

// Amplitudes in GHz, times in ns. One struct covers every kind; fields not
// used by a kind are ignored.
struct PulseEnvelope {
  PulseKind kind = PulseKind::Constant;
  double amplitude = 0.0;  // peak, base D0, level, or ramp target
  double sigma = 0.0;
  double duration = 0.0;
  int exponent = 2;
  double ramp_time = 0.0;
  int order = 5;
  double hold = std::numeric_limits<double>::infinity();
  // Gaussian with its edge value subtracted and the peak restored, so the
  // envelope starts and ends at exactly zero.
  bool lifted = true;
  double phase = 0.0;
  double carrier = 0.0;
  // Nonzero: the envelope is derivative_weight * d/dt of the shape (DRAG).
  double derivative_weight = 0.0;

  static PulseEnvelope truncated_gaussian(double peak, double sigma, double duration = -1.0);
  static PulseEnvelope adiabatic_poly(double base, int exponent, double duration);
  static PulseEnvelope constant(double level);
  // Smoothstep ramp 0 -> target; with finite hold, a mirrored ramp back to 0
  // follows the hold.
  static PulseEnvelope ramp_up(double target, double ramp_time, int order = 5,
                               double hold = std::numeric_limits<double>::infinity());

  void validate() const;
  // End of support; infinite for Constant and open-ended ramps.
  double support_end() const;
  std::string kind_name() const;
};

double evaluate(const PulseEnvelope &env, double t);
double derivative(const PulseEnvelope &env, double t);
double second_derivative(const PulseEnvelope &env, double t);

// (in-phase, quadrature) with quadrature = -(d/dt base) / (2 pi eta).
std::pair<PulseEnvelope, PulseEnvelope> drag_pair(const PulseEnvelope &base, double eta);

}  // namespace zzfree

#endif
