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

#ifndef ZZFREE_EFFECTIVE_MODEL_HPP
#define ZZFREE_EFFECTIVE_MODEL_HPP

#include <optional>
#include <utility>

#include "zzfree/circuit_model.hpp"

namespace zzfree {

// Resonator drive at carrier omega_res + detuning with strength amplitude.
struct DriveParams {
  double amplitude = 0.0;  // GHz
  double detuning = 0.0;   // GHz

  double alpha() const { return amplitude / detuning; }
  double photons() const { return alpha() * alpha(); }

  // Throws ValidationError on zero detuning or when |chi| >= |detuning|.
  void validate(double chi_left, double chi_right) const;
};

// Zero-point shift D^2 / (detuning - j_l chi_l - j_r chi_r).
double ezp(const DriveParams &drive, double chi_left, double chi_right, int j_left, int j_right);

// n_L n_R coefficient of the second-order expansion of ezp in chi.
double zz_dynamic_leading(const DriveParams &drive, double chi_left, double chi_right);

// Residual ZZ: ezp(1,1) + ezp(0,0) - ezp(1,0) - ezp(0,1) + zz_static.
double zz_total(const DriveParams &drive, const DressedModel &model);

struct CancellationPoint {
  double amplitude = 0.0;              // root of zz_total
  std::optional<double> leading_seed;  // root of leading order + zz_static, if one exists
  double residual = 0.0;               // zz_total at the root
};

CancellationPoint solve_cancellation(const DressedModel &model, double detuning, double tol = 1e-7);

// Shifts of the 0-1 frequencies (left, right) caused by the drive.
std::pair<double, double> stark_shifts(const DriveParams &drive, const DressedModel &model);

// Two-body coefficient of -(alpha^2/detuning)(chi_L n_L + chi_R n_R)^2.
// Throws NumericalError if it differs from zz_dynamic_leading beyond 1e-12
// relative.
double sizzle_crosscheck(const DressedModel &model, const DriveParams &drive);

struct FourWave {
  double left = 0.0;
  double right = 0.0;
  bool warn = false;  // either magnitude above 0.1
};

FourWave four_wave_coefficient(const DressedModel &model, const DriveParams &drive);

}  // namespace zzfree

#endif
