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

#ifndef ZZFREE_GATES_HPP
#define ZZFREE_GATES_HPP

#include <array>
#include <optional>
#include <string>

#include "zzfree/dynamics.hpp"

namespace zzfree {

using Map4 = Eigen::Matrix4cd;

// Local-Z gauge: angles (pre_L, pre_R, post_L, post_R).
using LocalZ = std::array<double, 4>;

Map4 local_z_matrix(double z_left, double z_right);
Map4 apply_local_z(const Map4 &map, const LocalZ &z);

struct FidelityResult {
  double fidelity = 0.0;
  LocalZ z{};
};

// (Tr M^dag M + |Tr U^dag M|^2) / (d (d + 1)), d = 4; equals the unitary
// form (|Tr U^dag M|^2 + d) / (d (d + 1)) when M is unitary.
double average_gate_fidelity(const Map4 &map, const Map4 &target);
FidelityResult average_gate_fidelity(const Map4 &map, const Map4 &target, bool optimize_local_z,
                                     const std::optional<LocalZ> &warm_start = std::nullopt);

// Channel fidelity from evolved |i><j| blocks, after the local-Z gauge z.
double channel_fidelity(const LindbladResult &channel, const Map4 &target, const LocalZ &z);

Map4 target_cnot(bool zero_controlled);
Map4 target_cz();

enum class CRFlavor { ZeroControlled, OneControlled };
enum class DragPlacement { None, Cancel, Both };

std::string flavor_name(CRFlavor f);
CRFlavor parse_flavor(const std::string &name);

struct CRGateSpec {
  CRFlavor flavor = CRFlavor::ZeroControlled;
  double drive_freq = 0.0;   // GHz, shared by both tones
  double cr_peak = 0.0;      // GHz
  double cancel_peak = 0.0;  // GHz
  double cancel_phase = 0.0;
  double duration = 40.0;    // ns; Gaussians with 2 sigma on each side
  DragPlacement drag = DragPlacement::Cancel;
  DriveParams rip_drive;

  void validate(const DressedModel &model) const;
};

struct CZGateSpec {
  int exponent = 2;
  double duration = 0.0;
  DriveParams rip_drive;

  void validate(const DressedModel &model) const;
};

struct GateResult {
  Map4 map = Map4::Zero();
  double avg_fidelity = 0.0;
  double coherent_error = 0.0;
  std::optional<double> total_error;  // with noise
  double leakage = 0.0;
  double diabatic_error = 0.0;
  double conditional_phase = 0.0;  // arg(M00 M11 / (M01 M10)) on the diagonal
  std::array<double, 4> phase_errors{};
  LocalZ local_z{};
  // Population of the target qubit's second excited level at the end,
  // maximized over the four inputs.
  double target_second_level = 0.0;
  PropagationResult trace;
};

// ZZ-free point used by the gates: the spectral root of the full Kerr model.
DriveParams rip_working_point(const DressedModel &model, double detuning = 0.1, const SimConfig &sim = {});

DriveSet cr_drives(const DressedModel &model, const CRGateSpec &spec);

GateResult simulate_cr_gate(const DressedModel &model, const CRGateSpec &spec, const SimConfig &sim,
                            const std::optional<NoiseSpec> &noise = std::nullopt);

// Starting point from the dressed drive coefficients: target rotation of pi
// from the conditional term and a cancel tone nulling the flavor's branch.
CRGateSpec cr_seed(const DressedModel &model, double duration, CRFlavor flavor, const DriveParams &rip);

struct CROptimization {
  CRGateSpec spec;
  GateResult result;
  int evals = 0;
  std::vector<double> seed_errors;  // best error per restart
};

struct CROptimizeOptions {
  int restarts = 3;
  int max_evals = 400;
  unsigned seed = 0;
};

CROptimization optimize_cr_gate(const DressedModel &model, double duration, CRFlavor flavor, const SimConfig &sim,
                                const CROptimizeOptions &opt = {}, std::optional<DriveParams> rip = std::nullopt);

// Shortest duration allowed by the static ZZ: 1 / (2 |chi'|).
double cz_min_duration(const DressedModel &model);

GateResult simulate_cz_gate(const DressedModel &model, const CZGateSpec &spec, const SimConfig &sim,
                            const std::optional<NoiseSpec> &noise = std::nullopt);

struct CZOptimization {
  double duration = 0.0;
  GateResult result;
  int evals = 0;
};

CZOptimization optimize_cz_duration(const DressedModel &model, int exponent, const SimConfig &sim,
                                    std::optional<DriveParams> rip = std::nullopt);

struct Dephasing {
  double rate = 0.0;        // 1/us
  double rate_limit = 0.0;  // large-detuning limit, 1/us
  double prefactor = 0.0;   // n chi^2 / (2 Delta^2)
};

// Resonator-induced dephasing of a qubit with dispersive shift chi (GHz),
// drive detuning (GHz), resonator decay kappa (1/us) and n photons.
Dephasing resonator_dephasing(double chi, double detuning, double kappa, double photons);

struct ErrorBudget {
  double eps_cx = 0.0;             // GHz
  double gamma = 0.0;              // mean transmon decoherence rate, 1/us
  double err_noise = 0.0;
  double err_zz_ratio = 0.0;       // |chi' / eps_cx|^2
  double j_estimate = 0.0;         // GHz
  double chi_prime_estimate = 0.0; // GHz
  double a_cx_estimate = 0.0;
  Dephasing dephasing_left, dephasing_right;
  double coherence_limit_left = 0.0, coherence_limit_right = 0.0;  // us
};

ErrorBudget error_budget(const DressedModel &model, const CRGateSpec &spec, const NoiseSpec &noise);

}  // namespace zzfree

#endif
