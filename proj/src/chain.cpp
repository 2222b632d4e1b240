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

#include "zzfree/chain.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "zzfree/errors.hpp"

namespace zzfree {

double ChainSpec::zz(int i, int j) const {
  auto it = zz_static.find({std::min(i, j), std::max(i, j)});
  return it == zz_static.end() ? 0.0 : it->second;
}

void ChainSpec::validate() const {
  const int n = size();
  if (n < 2) throw ValidationError("chain needs at least two qubits");
  if (static_cast<int>(resonators.size()) != n - 1) throw ValidationError("chain needs N - 1 resonators");
  if (static_cast<int>(chi.size()) != n - 1) throw ValidationError("chi needs one row per resonator");
  for (const auto &row : chi)
    if (static_cast<int>(row.size()) != n) throw ValidationError("chi rows need one entry per qubit");
  if (static_cast<int>(drives.size()) != n - 1) throw ValidationError("chain needs one drive per resonator");
  if (res_dim < 5) throw ValidationError("chain resonator dimension must be >= 5");
  for (int j = 0; j + 1 < n; ++j)
    if (chi[j][j] == 0.0 || chi[j][j + 1] == 0.0) {
      std::ostringstream msg;
      msg << "resonator " << j + 1 << " needs nonzero dispersive shifts to both adjacent qubits";
      throw ValidationError(msg.str());
    }
  for (const auto &[p, v] : zz_static)
    if (p.first < 0 || p.second >= n || p.first >= p.second || !std::isfinite(v))
      throw ValidationError("static ZZ keys must be sorted qubit pairs inside the chain");
  // Pole guard over every occupation pattern.
  for (int j = 0; j + 1 < n; ++j) {
    if (drives[j].detuning == 0.0) throw ValidationError("resonator drive detuning must be nonzero");
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      double den = drives[j].detuning;
      for (int k = 0; k < n; ++k)
        if (bits >> k & 1u) den -= chi[j][k];
      if (std::abs(den) < 1e-9) {
        std::ostringstream msg;
        msg << "resonator " << j + 1 << " drive sits on a pole for occupation pattern " << bits;
        throw SingularityError(msg.str());
      }
    }
  }
}

ChainSpec chain_from_model(const DressedModel &model, const DriveParams &drive) {
  ChainSpec c;
  c.qubits = {{model.omega_left, model.eta_left}, {model.omega_right, model.eta_right}};
  c.resonators = {model.omega_res};
  c.chi = {{model.chi_left, model.chi_right}};
  c.zz_static[{0, 1}] = model.zz_static;
  c.drives = {drive};
  return c;
}

std::vector<double> solve_chain_cancellation(const ChainSpec &spec) {
  spec.validate();
  std::vector<double> out;
  for (int j = 0; j + 1 < spec.size(); ++j) {
    DressedModel pair;
    pair.chi_left = spec.chi[j][j];
    pair.chi_right = spec.chi[j][j + 1];
    pair.zz_static = spec.zz(j, j + 1);
    try {
      out.push_back(solve_cancellation(pair, spec.drives[j].detuning).amplitude);
    } catch (const NoCancellationPointError &e) {
      std::ostringstream msg;
      msg << "resonator " << j + 1 << ": " << e.what();
      throw NoCancellationPointError(msg.str());
    }
  }
  return out;
}

namespace {

// Displaced-frame Hamiltonian of one driven resonator seeing the qubit pull
// x: (x - delta) a^dag a + x alpha (a + a^dag) + D^2/delta + x alpha^2.
RMat resonator_block(double x, const DriveParams &d, int dim) {
  const double alpha = d.amplitude / d.detuning;
  RMat a = annihilation(dim);
  RMat h = (x - d.detuning) * (a.transpose() * a) + x * alpha * (a + a.transpose());
  h.diagonal().array() += d.amplitude * alpha + x * alpha * alpha;
  return h;
}

// Eigenpair adiabatically connected to the displaced vacuum.
std::pair<double, RVec> vacuum_eigenpair(const RMat &h) {
  Eigen::SelfAdjointEigenSolver<RMat> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("resonator block diagonalization failed");
  Eigen::Index k;
  const double w = es.eigenvectors().row(0).cwiseAbs2().maxCoeff(&k);
  if (w <= 0.5) throw AmbiguousDressingError("displaced vacuum is not dominant in any resonator eigenstate");
  RVec v = es.eigenvectors().col(k);
  if (v(0) < 0) v = -v;
  return {es.eigenvalues()(k), v};
}

double pull(const ChainSpec &spec, int j, unsigned bits) {
  double x = 0.0;
  for (int k = 0; k < spec.size(); ++k)
    if (bits >> k & 1u) x += spec.chi[j][k];
  return x;
}

double static_energy(const ChainSpec &spec, unsigned bits) {
  double e = 0.0;
  for (const auto &[p, v] : spec.zz_static)
    if ((bits >> p.first & 1u) && (bits >> p.second & 1u)) e += v;
  return e;
}

// Energy from the phase accumulated by the displaced vacuum over tau,
// measured against the dressed reference and unwrapped along the way.
double propagated_energy(const RMat &h, double tau) {
  auto [e, ref] = vacuum_eigenpair(h);
  Eigen::SelfAdjointEigenSolver<RMat> es(h);
  const CMat v = es.eigenvectors().cast<cplx>();
  const CVec c0 = v.adjoint() * ref.cast<cplx>();
  // Steps small enough that the phase advances by less than pi/2 per step.
  const double spread = es.eigenvalues().cwiseAbs().maxCoeff() + 1e-12;
  const int steps = std::max(1, static_cast<int>(std::ceil(4.0 * spread * tau)));
  double phase = 0.0;
  for (int s = 1; s <= steps; ++s) {
    const double t = tau * s / steps;
    CVec ph = (es.eigenvalues() * (-kTwoPi * t)).unaryExpr([](double x) { return std::polar(1.0, x); });
    const cplx ov = ref.cast<cplx>().dot(v * ph.asDiagonal() * c0);
    phase += std::remainder(std::arg(ov) - phase, kTwoPi);
  }
  return -phase / (kTwoPi * tau);
}

double energy_impl(const ChainSpec &spec, unsigned bits, ResidualMethod method, double tau) {
  double e = static_energy(spec, bits);
  for (int j = 0; j + 1 < spec.size(); ++j) {
    RMat h = resonator_block(pull(spec, j, bits), spec.drives[j], spec.res_dim);
    e += method == ResidualMethod::Spectral ? vacuum_eigenpair(h).first : propagated_energy(h, tau);
  }
  return e;
}

// Alternating-sign combination over the qubits in `idx`, others empty.
double combination(const std::vector<double> &energies, const std::vector<int> &idx) {
  double total = 0.0;
  const unsigned m = static_cast<unsigned>(idx.size());
  for (unsigned sub = 0; sub < (1u << m); ++sub) {
    unsigned bits = 0;
    int ones = 0;
    for (unsigned b = 0; b < m; ++b)
      if (sub >> b & 1u) {
        bits |= 1u << idx[b];
        ++ones;
      }
    total += ((static_cast<int>(m) - ones) % 2 ? -1.0 : 1.0) * energies[bits];
  }
  return total;
}

}  // namespace

double chain_energy(const ChainSpec &spec, unsigned bits) {
  return energy_impl(spec, bits, ResidualMethod::Spectral, 0.0);
}

ResidualCouplings residual_couplings(const ChainSpec &spec, ResidualMethod method, double tau) {
  spec.validate();
  const int n = spec.size();
  if (n > 12) throw ValidationError("residual extraction supports at most 12 qubits");
  if (method == ResidualMethod::TimeDomain && !(tau > 0)) throw ValidationError("tau must be positive");
  std::vector<double> energies(1u << n);
  for (unsigned bits = 0; bits < energies.size(); ++bits) energies[bits] = energy_impl(spec, bits, method, tau);
  ResidualCouplings out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      out.two_body[{i, j}] = combination(energies, {i, j});
      for (int k = j + 1; k < n; ++k) out.three_body[{i, j, k}] = combination(energies, {i, j, k});
    }
  return out;
}

JointZero find_joint_zero(const ChainSpec &spec, double tol) {
  spec.validate();
  const int m = spec.size() - 1;
  ChainSpec work = spec;
  std::vector<double> d = solve_chain_cancellation(spec);
  auto residual = [&](const std::vector<double> &amps) {
    for (int j = 0; j < m; ++j) work.drives[j].amplitude = amps[j];
    ResidualCouplings r = residual_couplings(work);
    Eigen::VectorXd f(m);
    for (int j = 0; j < m; ++j) f(j) = r.two_body.at({j, j + 1});
    return f;
  };
  JointZero out;
  Eigen::VectorXd f = residual(d);
  for (out.iterations = 0; out.iterations < 50 && f.cwiseAbs().maxCoeff() > tol; ++out.iterations) {
    Eigen::MatrixXd jac(m, m);
    for (int c = 0; c < m; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(d[c]));
      std::vector<double> dp = d, dm = d;
      dp[c] += h;
      dm[c] -= h;
      jac.col(c) = (residual(dp) - residual(dm)) / (2.0 * h);
    }
    Eigen::VectorXd step = jac.fullPivLu().solve(f);
    for (int j = 0; j < m; ++j) d[j] -= step(j);
    f = residual(d);
  }
  if (f.cwiseAbs().maxCoeff() > 1e3 * tol) throw NumericalError("joint zero refinement did not converge");
  for (int j = 0; j < m; ++j) work.drives[j].amplitude = d[j];
  out.amplitudes = d;
  out.residuals = residual_couplings(work);
  return out;
}

std::vector<GridPoint> sweep_drive_map(const ChainSpec &spec, const std::vector<double> &d1,
                                       const std::vector<double> &d2) {
  if (spec.size() < 3) throw ValidationError("drive map needs at least two resonators");
  ChainSpec work = spec;
  std::vector<GridPoint> out;
  out.reserve(d1.size() * d2.size());
  for (double a : d1)
    for (double b : d2) {
      work.drives[0].amplitude = a;
      work.drives[1].amplitude = b;
      out.push_back({a, b, residual_couplings(work)});
    }
  return out;
}

}  // namespace zzfree
