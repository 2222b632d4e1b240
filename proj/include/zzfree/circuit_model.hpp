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

#ifndef ZZFREE_CIRCUIT_MODEL_HPP
#define ZZFREE_CIRCUIT_MODEL_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zzfree/linalg.hpp"

namespace zzfree {

// All energies are linear frequencies in GHz.
struct TransmonSpec {
  double ec = 0.0;
  double ej = 0.0;
  int charge_cutoff = 30;
  int kept_levels = 5;

  void validate() const;
  bool in_transmon_regime() const { return ej / ec >= 20.0; }
};

struct ResonatorSpec {
  double bare_freq = 0.0;
  int fock_dim = 8;

  void validate() const;
};

struct CouplingSpec {
  double g_left = 0.0;
  double g_right = 0.0;

  void validate() const;
};

struct CircuitSpec {
  TransmonSpec left;
  TransmonSpec right;
  ResonatorSpec resonator;
  CouplingSpec coupling;
  size_t max_dim = 4000;
};

struct TransmonSpectrum {
  RVec energies;  // ascending, ground at 0, kept_levels entries
  RMat charge;    // n-hat in the kept eigenbasis, <j|n|j+1> > 0
};

TransmonSpectrum transmon_spectrum(const TransmonSpec &spec);

// Bare label (j_L, n_C, j_R).
using Label = std::array<int, 3>;

struct FullHamiltonian {
  RMat h;
  int levels_left = 0;
  int fock_dim = 0;
  int levels_right = 0;
  TransmonSpectrum left;
  TransmonSpectrum right;

  int index(const Label &l) const { return (l[0] * fock_dim + l[1]) * levels_right + l[2]; }
  Label label(int idx) const {
    return {idx / (fock_dim * levels_right), (idx / levels_right) % fock_dim, idx % levels_right};
  }
};

// H = H_L + H_R + w_C a^dag a + (a + a^dag)(g_L n_L + g_R n_R) on the
// product of kept transmon eigenstates and resonator Fock states.
FullHamiltonian build_full_hamiltonian(const CircuitSpec &spec);

struct LabeledLevel {
  Label label;
  double energy = 0.0;  // relative to the (0,0,0) level
  double weight = 0.0;  // squared overlap with the bare label
};

struct LabeledSpectrum {
  std::vector<LabeledLevel> levels;  // ascending energy
  RMat vectors;                      // eigenvectors, column k <-> levels[k]
  std::map<Label, int> by_label;

  const LabeledLevel &at(const Label &l) const;
  double energy(const Label &l) const { return at(l).energy; }
  RVec vector(const Label &l) const { return vectors.col(by_label.at(l)); }
};

// Assigns each eigenvector the bare label of maximal overlap. Throws
// AmbiguousDressingError when a required label is missing or its weight is
// not above 0.5.
LabeledSpectrum diagonalize_and_label(const FullHamiltonian &h, const std::vector<Label> &required);

// Labels needed for dressed-parameter and drive-operator extraction.
std::vector<Label> required_labels(int drive_levels);

struct DriveCoefficient {
  std::string label;  // A_L, A_R, A_CX, A'_R, A'_CX
  cplx value;
};

struct DressedModel {
  double omega_left = 0.0, omega_right = 0.0, omega_res = 0.0;
  double eta_left = 0.0, eta_right = 0.0, eta_res = 0.0;
  double chi_left = 0.0, chi_right = 0.0;
  double zz_static = 0.0;
  double detuning_lr = 0.0;
  double j_eff = 0.0;
  double gtilde_left = 0.0, gtilde_right = 0.0;

  // Undressed quantities kept for the perturbative estimators.
  double bare_omega_left = 0.0, bare_omega_right = 0.0, bare_omega_res = 0.0;
  double charge_scale_left = 0.0, charge_scale_right = 0.0;  // (E_J / 32 E_C)^(1/4)

  std::vector<DriveCoefficient> drive_coeffs_left;
  std::vector<DriveCoefficient> drive_coeffs_right;

  // Dressed-basis matrices of n_L and n_R restricted to resonator vacuum,
  // indexed by j_L * drive_levels + j_R.
  int drive_levels = 0;
  RMat drive_left;
  RMat drive_right;

  cplx coeff(const std::string &which, const std::string &label) const;
};

DressedModel extract_dressed_params(const CircuitSpec &spec, int drive_levels = 3);

// Coefficients only, for one side.
std::vector<DriveCoefficient> extract_drive_coefficients(const CircuitSpec &spec, const std::string &which);

// Perturbative estimates used by the error budget.
double j_estimate(const DressedModel &m);
double a_cx_estimate(const DressedModel &m);

struct CalibrationTargets {
  double omega_left = 0.0, omega_right = 0.0;
  double eta_left = 0.0, eta_right = 0.0;
  double chi_left = 0.0, chi_right = 0.0;
  std::optional<double> zz_static;
};

struct CalibrationOptions {
  int max_evals = 2000;
  int restarts = 3;
  double freq_rtol = 1e-2;
  double chi_rtol = 5e-2;
};

struct CalibrationResult {
  CircuitSpec spec;
  DressedModel model;
  double residual = 0.0;  // sum of squared relative mismatches
  int evals = 0;
};

// Inverse problem: bare (E_C, E_J) pairs, couplings and resonator frequency
// whose dressed parameters match the targets. Throws CalibrationError when
// any target misses its tolerance after the evaluation budget.
CalibrationResult calibrate_bare_to_dressed(const CalibrationTargets &targets, const CircuitSpec &initial,
                                            const CalibrationOptions &opt = {});

}  // namespace zzfree

#endif
