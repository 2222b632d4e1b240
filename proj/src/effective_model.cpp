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

#include "zzfree/effective_model.hpp"

#include <cmath>
#include <sstream>

#include "zzfree/errors.hpp"
#include "zzfree/optimize.hpp"

namespace zzfree {

void DriveParams::validate(double chi_left, double chi_right) const {
  if (detuning == 0.0 || !std::isfinite(detuning)) throw ValidationError("drive detuning must be nonzero");
  if (!std::isfinite(amplitude)) throw ValidationError("drive amplitude must be finite");
  if (std::abs(chi_left) >= std::abs(detuning) || std::abs(chi_right) >= std::abs(detuning))
    throw ValidationError("drive detuning must exceed |chi| of both qubits");
}

double ezp(const DriveParams &drive, double chi_left, double chi_right, int j_left, int j_right) {
  double den = drive.detuning - j_left * chi_left - j_right * chi_right;
  if (std::abs(den) < 1e-9) {
    std::ostringstream msg;
    msg << "zero-point shift pole at occupations (" << j_left << "," << j_right << ")";
    throw SingularityError(msg.str());
  }
  return drive.amplitude * drive.amplitude / den;
}

double zz_dynamic_leading(const DriveParams &drive, double chi_left, double chi_right) {
  const double d = drive.detuning;
  if (std::abs(d) < 1e-9) throw SingularityError("zero drive detuning");
  // D^2/(d - x) expanded to second order: the x^2 term D^2 x^2/d^3 with
  // x = chi_L n_L + chi_R n_R carries the cross term 2 chi_L chi_R n_L n_R.
  return 2.0 * drive.amplitude * drive.amplitude * chi_left * chi_right / (d * d * d);
}

double zz_total(const DriveParams &drive, const DressedModel &m) {
  const double cl = m.chi_left, cr = m.chi_right;
  return ezp(drive, cl, cr, 1, 1) + ezp(drive, cl, cr, 0, 0) - ezp(drive, cl, cr, 1, 0) -
         ezp(drive, cl, cr, 0, 1) + m.zz_static;
}

CancellationPoint solve_cancellation(const DressedModel &m, double detuning, double tol) {
  DriveParams probe{0.0, detuning};
  probe.validate(m.chi_left, m.chi_right);
  CancellationPoint out;

  double lead = zz_dynamic_leading({1.0, detuning}, m.chi_left, m.chi_right);
  if (lead != 0.0 && -m.zz_static / lead >= 0.0) out.leading_seed = std::sqrt(-m.zz_static / lead);

  if (m.zz_static == 0.0) return out;
  auto f = [&](double amp) { return zz_total({amp, detuning}, m); };
  // zz_total - zz_static scales as D^2, so grow the bracket geometrically.
  double hi = std::abs(detuning);
  const double cap = 1e4 * std::abs(detuning);
  while ((f(hi) > 0) == (m.zz_static > 0) && hi < cap) hi *= 2.0;
  if ((f(hi) > 0) == (m.zz_static > 0)) {
    std::ostringstream msg;
    msg << "no cancellation point: dynamical ZZ has the same sign as the static ZZ (" << m.zz_static
        << " GHz) for detuning " << detuning << " GHz";
    throw NoCancellationPointError(msg.str());
  }
  out.amplitude = bracketed_root(f, 0.0, hi, tol);
  out.residual = f(out.amplitude);
  return out;
}

std::pair<double, double> stark_shifts(const DriveParams &drive, const DressedModel &m) {
  const double cl = m.chi_left, cr = m.chi_right;
  double e00 = ezp(drive, cl, cr, 0, 0);
  return {ezp(drive, cl, cr, 1, 0) - e00, ezp(drive, cl, cr, 0, 1) - e00};
}

double sizzle_crosscheck(const DressedModel &m, const DriveParams &drive) {
  const double a = drive.alpha();
  // Eliminating the residual displacement leaves +(a^2/d)(chi_L n_L + chi_R n_R)^2.
  double two_body = 2.0 * a * a * m.chi_left * m.chi_right / drive.detuning;
  double lead = zz_dynamic_leading(drive, m.chi_left, m.chi_right);
  double scale = std::max(std::abs(two_body), std::abs(lead));
  if (scale > 0.0 && std::abs(two_body - lead) > 1e-12 * scale)
    throw NumericalError("displaced-frame two-body coefficient disagrees with the leading-order ZZ");
  return two_body;
}

FourWave four_wave_coefficient(const DressedModel &m, const DriveParams &drive) {
  const double d2 = drive.detuning * drive.detuning;
  FourWave out{drive.amplitude * m.chi_left / d2, drive.amplitude * m.chi_right / d2, false};
  out.warn = std::abs(out.left) > 0.1 || std::abs(out.right) > 0.1;
  return out;
}

}  // namespace zzfree
