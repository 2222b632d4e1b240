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
#include <functional>
#include <random>

#include "zzfree/linalg.hpp"
#include "zzfree/optimize.hpp"

using namespace zzfree;

namespace {

CMat random_hermitian(int n, unsigned seed, double scale) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return scale * (a + a.adjoint()) / 2.0;
}

// Oracle: exp through the eigendecomposition computed here.
CMat eig_exp(const CMat &h, double dt) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  CVec ph(h.rows());
  for (int k = 0; k < h.rows(); ++k) ph(k) = std::polar(1.0, -kTwoPi * dt * es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST(Ladder, CommutatorIsIdentityBelowTruncation) {
  const int d = 7;
  RMat a = annihilation(d);
  RMat c = a * a.transpose() - a.transpose() * a;
  for (int k = 0; k < d - 1; ++k) EXPECT_NEAR(c(k, k), 1.0, 1e-14);
  EXPECT_NEAR(c(d - 1, d - 1), -(d - 1.0), 1e-14);
  EXPECT_TRUE((a.transpose() * a).isApprox(number_op(d)));
}

TEST(Ladder, NormalOrderedMatchesProducts) {
  const int d = 6;
  RMat a = annihilation(d), ad = a.transpose();
  EXPECT_TRUE(normal_ordered(d, 2, 2).isApprox(ad * ad * a * a));
  EXPECT_TRUE(normal_ordered(d, 1, 0).isApprox(ad));
  // Exact truncation: (a^dag)^2 a^2 = n (n - 1) on every kept level.
  RMat n2 = normal_ordered(d, 2, 2);
  for (int k = 0; k < d; ++k) EXPECT_NEAR(n2(k, k), k * (k - 1.0), 1e-12);
}

TEST(Kron, MixedProductProperty) {
  RMat a = RMat::Random(2, 2), b = RMat::Random(3, 3), c = RMat::Random(2, 2), d = RMat::Random(3, 3);
  EXPECT_TRUE(kron(RMat(a * c), RMat(b * d)).isApprox(kron(a, b) * kron(c, d), 1e-12));
}

TEST(Expm, MatchesEigendecomposition) {
  for (unsigned seed : {1u, 2u, 3u}) {
    CMat h = random_hermitian(12, seed, 0.7);
    EXPECT_LT((expm_hermitian(h, 0.37) - eig_exp(h, 0.37)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Expmv, MatchesDenseAndConservesNorm) {
  CMat h = random_hermitian(20, 7, 3.0);
  h.diagonal().array() += 40.0;  // large offset exercises the diagonal shift
  CMat v = CMat::Random(20, 3);
  CMat w = expmv_hermitian(h, 0.9, v);
  EXPECT_LT((w - eig_exp(h, 0.9) * v).cwiseAbs().maxCoeff(), 1e-11);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(w.col(c).norm(), v.col(c).norm(), 1e-12);
}

TEST(Hermiticity, DefectDetectsAsymmetry) {
  CMat h = random_hermitian(5, 3, 1.0);
  EXPECT_LT(hermiticity_defect(h), 1e-15);
  h(0, 1) += 0.1;
  EXPECT_GT(hermiticity_defect(h), 1e-3);
}

TEST(NelderMead, FindsRosenbrockMinimum) {
  auto f = [](const std::vector<double> &x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  NelderMeadOptions opt;
  opt.max_evals = 4000;
  opt.ftol = 1e-20;
  auto r = nelder_mead(f, {-1.2, 1.0}, {0.1, 0.1}, opt);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
  EXPECT_LE(r.evals, 4000);
}

TEST(BracketedRoot, SolvesCubic) {
  auto f = [](double x) { return x * x * x - 2.0; };
  EXPECT_NEAR(bracketed_root(f, 0.0, 3.0, 1e-14), std::cbrt(2.0), 1e-12);
}
