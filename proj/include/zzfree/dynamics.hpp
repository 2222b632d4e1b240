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

#ifndef ZZFREE_DYNAMICS_HPP
#define ZZFREE_DYNAMICS_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "zzfree/circuit_model.hpp"
#include "zzfree/effective_model.hpp"
#include "zzfree/pulses.hpp"

namespace zzfree {

enum class FrameKind { DressedLab, Rotating, Displaced };

struct FrameSpec {
  FrameKind kind = FrameKind::Displaced;
  bool rotating_wave = true;
  // Frequency both qubits rotate at. Unset: the carrier of the first qubit
  // drive, or each qubit's own frequency when there are no qubit drives.
  std::optional<double> qubit_frame;
};

enum class Integrator { Magnus2, Magnus4, AdaptiveRK };

struct SimConfig {
  double dt = 0.002;
  Integrator integrator = Integrator::Magnus2;
  int levels_left = 3;
  int levels_right = 3;
  int res_dim = 6;
  double norm_tolerance = 1e-8;
  double rk_tolerance = 1e-10;
  double truncation_tolerance = 1e-6;
  double leakage_tolerance = 1e-3;
  // Store qubit populations every this many steps (0: final only).
  int sample_every = 0;
};

enum class Qubit { Left, Right };

// 2 * envelope(t) * cos(carrier t + phase) applied to the dressed charge
// operator of one qubit; carrier and phase live in the envelope.
struct QubitDrive {
  Qubit target = Qubit::Left;
  PulseEnvelope envelope;
};

// Resonator drive 2 D(t) cos(w_d t) (a + a^dag), w_d = omega_res + detuning.
struct ResonatorDrive {
  PulseEnvelope envelope;
  double detuning = 0.1;
};

struct DriveSet {
  std::optional<ResonatorDrive> resonator;
  std::vector<QubitDrive> qubit;
};

// Time-dependent Hamiltonian of the dressed Kerr model with drives, in GHz.
// Basis index (j_L * levels_right + j_R) * res_dim + n.
class ModelHamiltonian {
 public:
  ModelHamiltonian(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                   const SimConfig &sim);

  CMat at(double t) const;
  // Drift part at time t: qubit drives and the frame-motion term left out.
  CMat drift_at(double t) const;
  bool is_constant() const { return terms_.empty(); }
  int dim() const { return dim_; }
  int index(int jl, int jr, int n) const { return (jl * sim_.levels_right + jr) * sim_.res_dim + n; }
  double frame_left() const { return frame_left_; }
  double frame_right() const { return frame_right_; }
  // Displacement of the frame at t (zero outside the displaced frame).
  double alpha(double t) const;
  const SimConfig &sim() const { return sim_; }
  // Resonator annihilation operator on the full space.
  const CMat &resonator_a() const { return a_; }
  const CMat &qubit_number(Qubit q) const { return q == Qubit::Left ? nl_ : nr_; }

  struct Entry {
    int row, col;
    cplx value;
  };

 private:
  struct Term {
    std::vector<Entry> op;  // nonzeros
    std::function<cplx(double)> coeff;
    bool add_adjoint;  // adds conj(coeff) * op^dag
    bool drift;        // belongs to the drift part
  };
  void add_term(CMat op, std::function<cplx(double)> coeff, bool add_adjoint, bool drift);

  SimConfig sim_;
  int dim_ = 0;
  double frame_left_ = 0.0, frame_right_ = 0.0;
  std::optional<ResonatorDrive> rdrive_;
  FrameKind kind_;
  CMat h0_;
  CMat a_, nl_, nr_;
  std::vector<Term> terms_;
};

struct PropagationResult {
  CMat states;                           // final states, one column per input
  std::vector<double> phases;            // unwrapped arg<ref_k(T)|psi_k(T)>
  std::vector<double> times;             // sample times
  std::vector<RMat> populations;         // per sample: qubit-level populations x inputs
  std::vector<double> leakage;           // per input: 1 - computational population at T
  double norm_drift = 0.0;
  double boundary_population = 0.0;      // max top-Fock population seen
  CMat computational_refs;               // references of 00, 01, 10, 11 at T (with labels)
};

// Eigenstate of the drift Hamiltonian at time t adiabatically connected to
// |j_L, j_R> times the frame vacuum.
CVec reference_state(const ModelHamiltonian &h, int jl, int jr, double t);
// Several references from one diagonalization, one column per label.
CMat reference_states(const ModelHamiltonian &h, const std::vector<std::array<int, 2>> &labels, double t);

// Propagates the columns of `initial` over [0, T]. Phases are measured
// against reference_state of the matching `labels` entry when given.
PropagationResult propagate(const ModelHamiltonian &h, const CMat &initial, double T,
                            const std::vector<std::array<int, 2>> &labels = {});

PropagationResult propagate_state(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                  const SimConfig &sim, const CVec &initial, double T);

// phi_10 + phi_01 - phi_00 - phi_11 under a constant resonator drive.
double controlled_phase(const DressedModel &model, const DriveParams &drive, const FrameSpec &frame,
                        const SimConfig &sim, double tau);

struct SubspaceMap {
  Eigen::Matrix4cd map;  // rows/cols ordered 00, 01, 10, 11 (j_L j_R)
  double leakage = 0.0;  // 1 - Tr(M^dag M)/4
  PropagationResult raw;
};

SubspaceMap propagate_subspace_map(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                   const SimConfig &sim, double T);

struct NoiseSpec {
  double t1_left = 0.0, t1_right = 0.0;  // us; 0 disables
  double t2_left = 0.0, t2_right = 0.0;  // us
  double kappa = 0.0;                    // resonator energy decay rate, 1/us
  double photons = 0.0;                  // mean resonator photons for estimators

  void validate() const;
};

struct LindbladResult {
  // chi[i][j] = projection onto the computational references of the evolved
  // |i><j|, as a 4x4 matrix; i, j in 00, 01, 10, 11 order.
  std::array<std::array<Eigen::Matrix4cd, 4>, 4> chi;
  double trace_drift = 0.0;
};

LindbladResult lindblad_propagate(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                  const SimConfig &sim, const NoiseSpec &noise, double T,
                                  size_t memory_cap_bytes = size_t{1} << 30);

// Single density matrix evolution for tests: rho(T) from rho(0).
CMat lindblad_evolve(const ModelHamiltonian &h, const NoiseSpec &noise, const CMat &rho0, double T);

// ZZ of the displaced-frame drift Hamiltonian at constant drive, from its
// spectrum (E11 + E00 - E10 - E01).
double zz_spectral(const DressedModel &model, const DriveParams &drive, const SimConfig &sim);

// Drive amplitude where zz_spectral vanishes: the ZZ-free point of the full
// Kerr model, resonator self-Kerr included.
double solve_cancellation_spectral(const DressedModel &model, double detuning, const SimConfig &sim = {},
                                   double tol = 1e-12);

// Drive amplitude where the time-domain controlled phase at tau vanishes,
// refined from the closed-form cancellation point.
double solve_cancellation_time_domain(const DressedModel &model, double detuning, const SimConfig &sim,
                                      double tau = 100.0, double tol = 1e-10);

}  // namespace zzfree

#endif
