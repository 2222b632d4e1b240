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

#include "test_support.hpp"
#include "zzfree/dynamics.hpp"
#include "zzfree/errors.hpp"
#include "zzfree/gates.hpp"

using namespace zzfree;
using zzfree::testing::gate_sim;
using zzfree::testing::two_qubit_model;

namespace {

FrameSpec displaced() { return {FrameKind::Displaced, true, std::nullopt}; }

// Seeded CR tones at the ZZ-free point: a realistic time-dependent drive set.
DriveSet cr_drive_set() {
  const DressedModel &m = two_qubit_model();
  CRGateSpec s = cr_seed(m, 40.0, CRFlavor::ZeroControlled, {0.2663791, 0.1});
  return cr_drives(m, s);
}

FrameSpec cr_frame() {
  FrameSpec f = displaced();
  f.qubit_frame = 5.275;
  return f;
}

CMat ground_and_excited(const ModelHamiltonian &h) {
  CMat v = CMat::Zero(h.dim(), 2);
  v.col(0) = reference_state(h, 0, 0, 0.0);
  v.col(1) = reference_state(h, 1, 1, 0.0);
  return v;
}

}  // namespace

TEST(Hamiltonian, HermitianAlongTheGate) {
  ModelHamiltonian h(two_qubit_model(), cr_drive_set(), cr_frame(), gate_sim());
  for (double t : {0.0, 3.3, 12.0, 20.0, 31.7, 40.0}) EXPECT_LT(hermiticity_defect(h.at(t)), 1e-14) << t;
}

TEST(Hamiltonian, LabFrameNeedsRoomForPhotons) {
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::constant(0.27), 0.1};
  SimConfig s = gate_sim();
  s.res_dim = 8;
  EXPECT_THROW(ModelHamiltonian(two_qubit_model(), ds, {FrameKind::Rotating, true, std::nullopt}, s),
               ValidationError);
}

TEST(Propagation, ConservesNorm) {
  ModelHamiltonian h(two_qubit_model(), cr_drive_set(), cr_frame(), gate_sim());
  PropagationResult r = propagate(h, ground_and_excited(h), 40.0);
  EXPECT_LT(r.norm_drift, 1e-8);
  for (int c = 0; c < 2; ++c) EXPECT_NEAR(r.states.col(c).norm(), 1.0, 1e-9);
}

// Error against a fine reference should drop by 2^p when dt halves.
TEST(Propagation, IntegratorOrders) {
  const DressedModel &m = two_qubit_model();
  const DriveSet ds = cr_drive_set();
  auto final_states = [&](Integrator integ, double dt) {
    SimConfig s = gate_sim(dt);
    s.integrator = integ;
    ModelHamiltonian h(m, ds, cr_frame(), s);
    return propagate(h, ground_and_excited(h), 40.0).states;
  };
  const CMat ref = final_states(Integrator::Magnus4, 0.00625);
  const double e4a = (final_states(Integrator::Magnus4, 0.2) - ref).norm();
  const double e4b = (final_states(Integrator::Magnus4, 0.1) - ref).norm();
  EXPECT_GT(e4a / e4b, 12.0);
  EXPECT_LT(e4a / e4b, 20.0);
  const double e2a = (final_states(Integrator::Magnus2, 0.1) - ref).norm();
  const double e2b = (final_states(Integrator::Magnus2, 0.05) - ref).norm();
  EXPECT_GT(e2a / e2b, 3.5);
  EXPECT_LT(e2a / e2b, 4.5);
}

TEST(Propagation, AdaptiveAgreesWithMagnus) {
  const DressedModel &m = two_qubit_model();
  const DriveSet ds = cr_drive_set();
  SimConfig s4 = gate_sim(0.05), rk = gate_sim(0.05);
  rk.integrator = Integrator::AdaptiveRK;
  ModelHamiltonian h4(m, ds, cr_frame(), s4), hr(m, ds, cr_frame(), rk);
  const CMat a = propagate(h4, ground_and_excited(h4), 40.0).states;
  const CMat b = propagate(hr, ground_and_excited(hr), 40.0).states;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ControlledPhase, UndrivenPhaseIsStaticZZ) {
  const DressedModel &m = two_qubit_model();
  const double tau = 10.0;
  const double phi = controlled_phase(m, {0.0, 0.1}, displaced(), gate_sim(), tau);
  // phi_k = -2 pi E_k tau, so the combination is 2 pi zz tau.
  EXPECT_NEAR(phi, kTwoPi * m.zz_static * tau, 1e-8);
}

TEST(ControlledPhase, DisplacedAndRotatingFramesAgree) {
  const DressedModel &m = two_qubit_model();
  const DriveParams d{0.2, 0.1};
  SimConfig lab = gate_sim(0.05);
  lab.res_dim = 26;
  const double rot = controlled_phase(m, d, {FrameKind::Rotating, true, std::nullopt}, lab, 20.0);
  SimConfig disp = gate_sim(0.05);
  disp.res_dim = 8;
  const double dis = controlled_phase(m, d, displaced(), disp, 20.0);
  EXPECT_NEAR(rot, dis, 1e-6);
}

TEST(ControlledPhase, SlopeMatchesSpectralZZ) {
  const DressedModel &m = two_qubit_model();
  const DriveParams d{0.15, 0.1};
  const SimConfig s = gate_sim(0.05);
  const double phi = controlled_phase(m, d, displaced(), s, 50.0);
  EXPECT_NEAR(phi, kTwoPi * zz_spectral(m, d, s) * 50.0, 2e-4);
}

TEST(Spectral, UndrivenZZIsStatic) {
  const DressedModel &m = two_qubit_model();
  EXPECT_NEAR(zz_spectral(m, {0.0, 0.1}, gate_sim()), m.zz_static, 1e-12);
}

TEST(Cancellation, NumericalRootsAgreeAndBeatLeadingOrder) {
  const DressedModel &m = two_qubit_model();
  SimConfig s = gate_sim(0.05);
  const double spectral = solve_cancellation_spectral(m, 0.1, s);
  const double timed = solve_cancellation_time_domain(m, 0.1, s, 100.0);
  EXPECT_NEAR(spectral, timed, 1e-4);
  const CancellationPoint cp = solve_cancellation(m, 0.1);
  EXPECT_LT(std::abs(cp.amplitude - timed), std::abs(*cp.leading_seed - timed));
  // Neglecting the resonator self-Kerr leaves a small bias.
  EXPECT_LT(std::abs(cp.amplitude - timed), 0.01);
}

TEST(Lindblad, T1DecayMatchesExponential) {
  const DressedModel &m = two_qubit_model();
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::constant(0.0), 0.1};
  SimConfig s = gate_sim(0.5);
  ModelHamiltonian h(m, ds, displaced(), s);
  NoiseSpec n;
  n.t1_left = 2.0;  // us
  const CVec psi = reference_state(h, 1, 0, 0.0);
  const CMat rho0 = psi * psi.adjoint();
  const double T = 300.0;
  const CMat rho = lindblad_evolve(h, n, rho0, T);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
  const double p1 = (psi.adjoint() * rho * psi)(0, 0).real();
  EXPECT_NEAR(p1, std::exp(-T * 1e-3 / 2.0), 1e-6);
  EXPECT_LT(hermiticity_defect(rho), 1e-12);
}

TEST(Lindblad, PureDephasingDecaysCoherence) {
  const DressedModel &m = two_qubit_model();
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::constant(0.0), 0.1};
  ModelHamiltonian h(m, ds, displaced(), gate_sim(0.5));
  NoiseSpec n;
  n.t1_right = 4.0;
  n.t2_right = 3.0;
  const CVec g = reference_state(h, 0, 0, 0.0), e = reference_state(h, 0, 1, 0.0);
  const CVec plus = (g + e) / std::sqrt(2.0);
  const double T = 200.0;
  const CMat rho = lindblad_evolve(h, n, plus * plus.adjoint(), T);
  EXPECT_NEAR(std::abs((g.adjoint() * rho * e)(0, 0)), 0.5 * std::exp(-T * 1e-3 / 3.0), 1e-6);
}

TEST(Lindblad, RejectsUnphysicalT2) {
  NoiseSpec n;
  n.t1_left = 10.0;
  n.t2_left = 25.0;
  EXPECT_THROW(n.validate(), ValidationError);
}
