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

#ifndef ZZFREE_CHAIN_HPP
#define ZZFREE_CHAIN_HPP

#include <array>
#include <map>
#include <utility>
#include <vector>

#include "zzfree/circuit_model.hpp"
#include "zzfree/effective_model.hpp"

namespace zzfree {

struct ChainQubit {
  double omega = 0.0;  // GHz
  double eta = 0.0;    // GHz
};

// N qubits, N - 1 resonators; resonator j couples qubits j and j + 1.
struct ChainSpec {
  std::vector<ChainQubit> qubits;
  std::vector<double> resonators;        // GHz
  std::vector<std::vector<double>> chi;  // chi[resonator][qubit], GHz
  std::map<std::pair<int, int>, double> zz_static;  // sorted pairs, GHz
  std::vector<DriveParams> drives;       // one per resonator
  int res_dim = 10;                      // Fock states per resonator (displaced frame)

  int size() const { return static_cast<int>(qubits.size()); }
  double zz(int i, int j) const;
  void validate() const;
};

// Two-qubit model recast as an N = 2 chain.
ChainSpec chain_from_model(const DressedModel &model, const DriveParams &drive);

struct ResidualCouplings {
  std::map<std::pair<int, int>, double> two_body;        // GHz
  std::map<std::array<int, 3>, double> three_body;       // GHz
};

enum class ResidualMethod { Spectral, TimeDomain };

// Per-resonator closed-form cancellation amplitudes.
std::vector<double> solve_chain_cancellation(const ChainSpec &spec);

// Energy of qubit occupation pattern `bits` (bit k = qubit k) from the driven
// displaced resonators, diagonalized numerically.
double chain_energy(const ChainSpec &spec, unsigned bits);

ResidualCouplings residual_couplings(const ChainSpec &spec, ResidualMethod method = ResidualMethod::Spectral,
                                     double tau = 1000.0);

struct JointZero {
  std::vector<double> amplitudes;
  ResidualCouplings residuals;
  int iterations = 0;
};

// Drive amplitudes zeroing every adjacent residual, refined by Newton steps
// from the closed-form solution.
JointZero find_joint_zero(const ChainSpec &spec, double tol = 1e-13);

struct GridPoint {
  double d1 = 0.0, d2 = 0.0;
  ResidualCouplings residuals;
};

// Residuals over a grid of the first two drive amplitudes.
std::vector<GridPoint> sweep_drive_map(const ChainSpec &spec, const std::vector<double> &d1,
                                       const std::vector<double> &d2);

}  // namespace zzfree

#endif
