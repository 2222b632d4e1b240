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

#ifndef ZZFREE_LINALG_HPP
#define ZZFREE_LINALG_HPP

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace zzfree {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Truncated annihilation operator on a dim-level ladder.
RMat annihilation(int dim);

// Number operator diag(0..dim-1).
RMat number_op(int dim);

// Exact truncation of the normal-ordered monomial (a^dag)^k a^l.
RMat normal_ordered(int dim, int k, int l);

CMat kron(const CMat &a, const CMat &b);
RMat kron(const RMat &a, const RMat &b);

// Largest |A - A^dag| entry relative to the largest |A| entry.
double hermiticity_defect(const CMat &a);

// exp(-i * 2pi * dt * H) * V, H in GHz and dt in ns. Scaled Taylor series,
// truncated once a term drops below tol in max norm.
CMat expmv_hermitian(const CMat &h, double dt, const CMat &v, double tol = 1e-15);

// Dense exp(-i * 2pi * dt * H).
CMat expm_hermitian(const CMat &h, double dt);

}  // namespace zzfree

#endif
