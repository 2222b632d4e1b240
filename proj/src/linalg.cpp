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

#include "zzfree/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "zzfree/errors.hpp"

namespace zzfree {

RMat annihilation(int dim) {
  RMat a = RMat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

RMat number_op(int dim) {
  RMat n = RMat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = k;
  return n;
}

RMat normal_ordered(int dim, int k, int l) {
  // <m|a^dag^k a^l|n> = sqrt(n!/(n-l)!) sqrt(m!/(m-k)!) when n-l = m-k.
  RMat out = RMat::Zero(dim, dim);
  for (int n = l; n < dim; ++n) {
    int mid = n - l;
    int m = mid + k;
    if (m >= dim) continue;
    double c = 1.0;
    for (int i = 0; i < l; ++i) c *= std::sqrt(static_cast<double>(n - i));
    for (int i = 0; i < k; ++i) c *= std::sqrt(static_cast<double>(m - i));
    out(m, n) = c;
  }
  return out;
}

CMat kron(const CMat &a, const CMat &b) { return Eigen::kroneckerProduct(a, b).eval(); }
RMat kron(const RMat &a, const RMat &b) { return Eigen::kroneckerProduct(a, b).eval(); }

double hermiticity_defect(const CMat &a) {
  double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

CMat expmv_hermitian(const CMat &h, double dt, const CMat &v, double tol) {
  // Centre the spectrum; the shift returns as a global phase.
  const RVec diag = h.diagonal().real();
  const double shift = 0.5 * (diag.maxCoeff() + diag.minCoeff());
  CMat hs = h;
  hs.diagonal().array() -= shift;
  // Substeps keep each Taylor argument below 1 in induced 1-norm.
  double norm = hs.cwiseAbs().colwise().sum().maxCoeff() * kTwoPi * std::abs(dt);
  int substeps = std::max(1, static_cast<int>(std::ceil(norm)));
  cplx factor(0.0, -kTwoPi * dt / substeps);
  CMat out = v;
  CMat term(v.rows(), v.cols());
  for (int s = 0; s < substeps; ++s) {
    term = out;
    CMat acc = out;
    double ref = std::max(out.cwiseAbs().maxCoeff(), 1e-300);
    for (int k = 1; k < 60; ++k) {
      term = (factor / static_cast<double>(k)) * (hs * term);
      acc += term;
      if (term.cwiseAbs().maxCoeff() < tol * ref) break;
      if (k == 59) throw IntegratorError("Taylor series for exp(-iHt) did not converge");
    }
    out = std::move(acc);
  }
  return out * std::polar(1.0, -kTwoPi * shift * dt);
}

CMat expm_hermitian(const CMat &h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in expm");
  CVec phases = (es.eigenvalues() * (-kTwoPi * dt)).unaryExpr([](double x) {
    return std::polar(1.0, x);
  }).eval().cast<cplx>();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace zzfree
