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

#include "zzfree/circuit_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "zzfree/errors.hpp"

namespace zzfree {

void TransmonSpec::validate() const {
  if (!(ec > 0)) throw ValidationError("transmon: ec must be positive");
  if (!(ej > 0)) throw ValidationError("transmon: ej must be positive");
  if (charge_cutoff < 10) throw ValidationError("transmon: charge_cutoff must be >= 10");
  if (kept_levels < 3 || kept_levels > 2 * charge_cutoff + 1)
    throw ValidationError("transmon: kept_levels must lie in [3, 2*charge_cutoff+1]");
}

void ResonatorSpec::validate() const {
  if (!(bare_freq > 0)) throw ValidationError("resonator: bare_freq must be positive");
  if (fock_dim < 2) throw ValidationError("resonator: fock_dim must be >= 2");
}

void CouplingSpec::validate() const {
  if (!std::isfinite(g_left) || !std::isfinite(g_right)) throw ValidationError("coupling: g must be finite");
}

TransmonSpectrum transmon_spectrum(const TransmonSpec &spec) {
  spec.validate();
  const int nc = spec.charge_cutoff;
  const int dim = 2 * nc + 1;
  RMat h = RMat::Zero(dim, dim);
  RMat n = RMat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    double q = i - nc;
    h(i, i) = 4.0 * spec.ec * q * q;
    n(i, i) = q;
    if (i + 1 < dim) h(i, i + 1) = h(i + 1, i) = -0.5 * spec.ej;
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("transmon diagonalization did not converge");

  const int kept = spec.kept_levels;
  RMat v = es.eigenvectors().leftCols(kept);
  // Ground state with positive central amplitude, then <j|n|j+1> > 0.
  if (v(nc, 0) < 0) v.col(0) *= -1.0;
  for (int j = 1; j < kept; ++j) {
    double m = v.col(j - 1).dot(n * v.col(j));
    if (m < 0) v.col(j) *= -1.0;
  }
  TransmonSpectrum out;
  out.energies = es.eigenvalues().head(kept).array() - es.eigenvalues()(0);
  out.charge = v.transpose() * n * v;
  return out;
}

FullHamiltonian build_full_hamiltonian(const CircuitSpec &spec) {
  spec.left.validate();
  spec.right.validate();
  spec.resonator.validate();
  spec.coupling.validate();
  FullHamiltonian out;
  out.levels_left = spec.left.kept_levels;
  out.levels_right = spec.right.kept_levels;
  out.fock_dim = spec.resonator.fock_dim;
  const size_t dim = static_cast<size_t>(out.levels_left) * out.fock_dim * out.levels_right;
  if (dim > spec.max_dim) {
    std::ostringstream msg;
    msg << "full Hamiltonian dimension " << dim << " exceeds cap " << spec.max_dim;
    throw ResourceError(msg.str());
  }
  out.left = transmon_spectrum(spec.left);
  out.right = transmon_spectrum(spec.right);

  const int nl = out.levels_left, nf = out.fock_dim, nr = out.levels_right;
  RMat il = RMat::Identity(nl, nl), ic = RMat::Identity(nf, nf), ir = RMat::Identity(nr, nr);
  RMat a = annihilation(nf);
  RMat x = a + a.transpose();
  RMat hl = out.left.energies.asDiagonal();
  RMat hr = out.right.energies.asDiagonal();
  RMat hc = spec.resonator.bare_freq * number_op(nf);

  out.h = kron(kron(hl, ic), ir) + kron(kron(il, hc), ir) + kron(kron(il, ic), hr) +
          spec.coupling.g_left * kron(kron(out.left.charge, x), ir) +
          spec.coupling.g_right * kron(kron(il, x), out.right.charge);
  return out;
}

const LabeledLevel &LabeledSpectrum::at(const Label &l) const {
  auto it = by_label.find(l);
  if (it == by_label.end()) {
    std::ostringstream msg;
    msg << "label (" << l[0] << "," << l[1] << "," << l[2] << ") not in labeled spectrum";
    throw AmbiguousDressingError(msg.str());
  }
  return levels[it->second];
}

LabeledSpectrum diagonalize_and_label(const FullHamiltonian &h, const std::vector<Label> &required) {
  Eigen::SelfAdjointEigenSolver<RMat> es(h.h);
  if (es.info() != Eigen::Success) throw NumericalError("full Hamiltonian diagonalization did not converge");
  const int dim = static_cast<int>(h.h.rows());

  LabeledSpectrum out;
  out.vectors = es.eigenvectors();
  out.levels.resize(dim);
  std::map<Label, double> best_weight;
  for (int k = 0; k < dim; ++k) {
    Eigen::Index arg;
    double w = out.vectors.col(k).cwiseAbs2().maxCoeff(&arg);
    if (out.vectors(arg, k) < 0) out.vectors.col(k) *= -1.0;
    Label l = h.label(static_cast<int>(arg));
    out.levels[k] = {l, es.eigenvalues()(k), w};
    double &bw = best_weight[l];
    bw = std::max(bw, w);
    // Weight above 1/2 makes the assignment unique.
    if (w > 0.5) out.by_label[l] = k;
  }
  for (const auto &l : required) {
    if (!out.by_label.count(l)) {
      // Report the largest overlap any eigenvector has with this bare state.
      double w = 0.0;
      int idx = h.index(l);
      if (idx >= 0 && idx < dim) w = out.vectors.row(idx).cwiseAbs2().maxCoeff();
      std::ostringstream msg;
      msg << "ambiguous dressing: label (" << l[0] << "," << l[1] << "," << l[2]
          << ") has maximal overlap " << w << " <= 0.5";
      throw AmbiguousDressingError(msg.str());
    }
  }
  if (!out.by_label.count({0, 0, 0})) throw AmbiguousDressingError("ground state could not be labeled");
  double e0 = out.levels[out.by_label.at({0, 0, 0})].energy;
  for (auto &lv : out.levels) lv.energy -= e0;
  return out;
}

std::vector<Label> required_labels(int drive_levels) {
  std::vector<Label> out;
  for (int jl = 0; jl < drive_levels; ++jl)
    for (int jr = 0; jr < drive_levels; ++jr) out.push_back({jl, 0, jr});
  out.push_back({0, 1, 0});
  out.push_back({0, 2, 0});
  out.push_back({1, 1, 0});
  out.push_back({0, 1, 1});
  return out;
}

cplx DressedModel::coeff(const std::string &which, const std::string &label) const {
  const auto &list = which == "left" ? drive_coeffs_left : drive_coeffs_right;
  for (const auto &c : list)
    if (c.label == label) return c.value;
  throw ValidationError("unknown drive coefficient " + label);
}

namespace {

// Dressed matrix of a bare operator between (j_L, 0, j_R) states.
RMat vacuum_block(const LabeledSpectrum &spec, const RMat &op, int levels) {
  const int d = levels * levels;
  RMat vecs(op.rows(), d);
  for (int jl = 0; jl < levels; ++jl)
    for (int jr = 0; jr < levels; ++jr) vecs.col(jl * levels + jr) = spec.vector({jl, 0, jr});
  return vecs.transpose() * op * vecs;
}

// Coefficients of the dressed expansion read off the vacuum block. `self`
// selects matrix elements on the driven qubit, `other` on the partner.
std::vector<DriveCoefficient> coefficients_from_block(const RMat &m, int levels, bool left_driven) {
  auto el = [&](int a_self, int a_other, int b_self, int b_other) {
    int al = left_driven ? a_self : a_other, ar = left_driven ? a_other : a_self;
    int bl = left_driven ? b_self : b_other, br = left_driven ? b_other : b_self;
    return m(al * levels + ar, bl * levels + br);
  };
  const double s2 = std::sqrt(2.0);
  double a_self = el(0, 0, 1, 0);
  double a_other = el(0, 0, 0, 1);
  double a_cx = el(1, 0, 1, 1) - a_other;
  double a_other_p = el(0, 1, 0, 2) / s2 - a_other;
  double a_cx_p = el(1, 1, 1, 2) / s2 - a_other - a_cx - a_other_p;
  // Names follow the left-driven convention; for a right drive the roles swap.
  std::string s = left_driven ? "L" : "R", o = left_driven ? "R" : "L";
  return {{"A_" + s, a_self}, {"A_" + o, a_other}, {"A_CX", a_cx}, {"A'_" + o, a_other_p}, {"A'_CX", a_cx_p}};
}

double des_cloizeaux_j(const FullHamiltonian &h, const LabeledSpectrum &spec) {
  int il = h.index({1, 0, 0}), ir = h.index({0, 0, 1});
  RVec vl = spec.vector({1, 0, 0}), vr = spec.vector({0, 0, 1});
  Eigen::Matrix2d p;
  p << vl(il), vr(il), vl(ir), vr(ir);
  Eigen::Matrix2d e = Eigen::Vector2d(spec.energy({1, 0, 0}), spec.energy({0, 0, 1})).asDiagonal();
  Eigen::Matrix2d s = p * p.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> ss(s);
  Eigen::Matrix2d s_inv_half =
      ss.eigenvectors() * ss.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * ss.eigenvectors().transpose();
  Eigen::Matrix2d heff = s_inv_half * p * e * p.transpose() * s_inv_half;
  return heff(0, 1);
}

}  // namespace

DressedModel extract_dressed_params(const CircuitSpec &spec, int drive_levels) {
  if (drive_levels < 3) throw ValidationError("drive_levels must be >= 3");
  if (drive_levels > spec.left.kept_levels || drive_levels > spec.right.kept_levels)
    throw ValidationError("drive_levels exceeds kept transmon levels");
  FullHamiltonian h = build_full_hamiltonian(spec);
  LabeledSpectrum ls = diagonalize_and_label(h, required_labels(drive_levels));
  auto e = [&](int jl, int n, int jr) { return ls.energy({jl, n, jr}); };

  DressedModel m;
  m.omega_left = e(1, 0, 0);
  m.omega_right = e(0, 0, 1);
  m.omega_res = e(0, 1, 0);
  m.eta_left = e(2, 0, 0) - 2.0 * e(1, 0, 0);
  m.eta_right = e(0, 0, 2) - 2.0 * e(0, 0, 1);
  m.eta_res = e(0, 2, 0) - 2.0 * e(0, 1, 0);
  m.chi_left = e(1, 1, 0) - e(1, 0, 0) - e(0, 1, 0);
  m.chi_right = e(0, 1, 1) - e(0, 0, 1) - e(0, 1, 0);
  m.zz_static = e(1, 0, 1) - e(1, 0, 0) - e(0, 0, 1);
  m.detuning_lr = m.omega_left - m.omega_right;
  m.j_eff = des_cloizeaux_j(h, ls);

  m.bare_omega_left = h.left.energies(1);
  m.bare_omega_right = h.right.energies(1);
  m.bare_omega_res = spec.resonator.bare_freq;
  m.charge_scale_left = std::pow(spec.left.ej / (32.0 * spec.left.ec), 0.25);
  m.charge_scale_right = std::pow(spec.right.ej / (32.0 * spec.right.ec), 0.25);
  m.gtilde_left = m.charge_scale_left * spec.coupling.g_left;
  m.gtilde_right = m.charge_scale_right * spec.coupling.g_right;

  const int nl = h.levels_left, nf = h.fock_dim, nr = h.levels_right;
  const RMat il = RMat::Identity(nl, nl), ic = RMat::Identity(nf, nf), ir = RMat::Identity(nr, nr);
  RMat op_l = kron(kron(h.left.charge, ic), ir);
  RMat op_r = kron(kron(il, ic), h.right.charge);
  m.drive_levels = drive_levels;
  m.drive_left = vacuum_block(ls, op_l, drive_levels);
  m.drive_right = vacuum_block(ls, op_r, drive_levels);
  m.drive_coeffs_left = coefficients_from_block(m.drive_left, drive_levels, true);
  m.drive_coeffs_right = coefficients_from_block(m.drive_right, drive_levels, false);
  return m;
}

std::vector<DriveCoefficient> extract_drive_coefficients(const CircuitSpec &spec, const std::string &which) {
  if (which != "left" && which != "right") throw ValidationError("which must be left or right");
  DressedModel m = extract_dressed_params(spec, 3);
  return which == "left" ? m.drive_coeffs_left : m.drive_coeffs_right;
}

double j_estimate(const DressedModel &m) {
  const double wl = m.bare_omega_left, wr = m.bare_omega_right, wc = m.bare_omega_res;
  double rot = (wl + wr - 2.0 * wc) / (2.0 * (wl - wc) * (wr - wc));
  double counter = (wl + wr + 2.0 * wc) / (2.0 * (wl + wc) * (wr + wc));
  return m.gtilde_left * m.gtilde_right * (rot - counter);
}

double a_cx_estimate(const DressedModel &m) {
  double eta = 0.5 * (m.eta_left + m.eta_right);
  double d = m.detuning_lr;
  return m.charge_scale_left * 2.0 * m.j_eff * eta / (d * (eta + d));
}

namespace {

struct CalibrationProblem {
  const CalibrationTargets &t;
  CircuitSpec base;
  bool fit_resonator;

  CircuitSpec spec_from(const Eigen::VectorXd &x) const {
    CircuitSpec s = base;
    s.left.ec = std::exp(x[0]);
    s.left.ej = std::exp(x[1]);
    s.right.ec = std::exp(x[2]);
    s.right.ej = std::exp(x[3]);
    s.coupling.g_left = std::exp(x[4]);
    s.coupling.g_right = std::exp(x[5]);
    if (fit_resonator) s.resonator.bare_freq = std::exp(x[6]);
    return s;
  }

  // Relative mismatches, frequencies first.
  Eigen::VectorXd residuals(const DressedModel &m) const {
    Eigen::VectorXd r(t.zz_static ? 7 : 6);
    r.head(6) << (m.omega_left - t.omega_left) / t.omega_left, (m.omega_right - t.omega_right) / t.omega_right,
        (m.eta_left - t.eta_left) / std::abs(t.eta_left), (m.eta_right - t.eta_right) / std::abs(t.eta_right),
        (m.chi_left - t.chi_left) / std::abs(t.chi_left), (m.chi_right - t.chi_right) / std::abs(t.chi_right);
    if (t.zz_static) r(6) = (m.zz_static - *t.zz_static) / std::abs(*t.zz_static);
    return r;
  }
};

// Functor shape expected by Eigen's Levenberg-Marquardt and NumericalDiff.
struct CalibrationFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const CalibrationProblem *prob;
  int n_in, n_out;
  int *evals;

  int inputs() const { return n_in; }
  int values() const { return n_out; }
  int operator()(const Eigen::VectorXd &x, Eigen::VectorXd &fvec) const {
    ++*evals;
    try {
      fvec = prob->residuals(extract_dressed_params(prob->spec_from(x), 3));
    } catch (const NumericalError &) {
      fvec = Eigen::VectorXd::Constant(n_out, 1e3);
    }
    return 0;
  }
};

// Transmon-limit inversion: omega ~ sqrt(8 EJ EC) - EC, eta ~ -EC.
Eigen::VectorXd heuristic_guess(const CalibrationTargets &t, double wc) {
  double ecl = -t.eta_left, ecr = -t.eta_right;
  double ejl = std::pow(t.omega_left + ecl, 2) / (8.0 * ecl);
  double ejr = std::pow(t.omega_right + ecr, 2) / (8.0 * ecr);
  auto g_for = [&](double w, double eta, double chi, double ec, double ej) {
    double d = w - wc;
    double gt = std::sqrt(std::abs(chi * d * (d + eta) / (2.0 * eta)));
    return gt / std::pow(ej / (32.0 * ec), 0.25);
  };
  Eigen::VectorXd x(7);
  x << std::log(ecl), std::log(ejl), std::log(ecr), std::log(ejr),
      std::log(g_for(t.omega_left, t.eta_left, t.chi_left, ecl, ejl)),
      std::log(g_for(t.omega_right, t.eta_right, t.chi_right, ecr, ejr)), std::log(wc);
  return x;
}

}  // namespace

CalibrationResult calibrate_bare_to_dressed(const CalibrationTargets &targets, const CircuitSpec &initial,
                                            const CalibrationOptions &opt) {
  if (!(targets.omega_left > 0 && targets.omega_right > 0) || targets.eta_left == 0 || targets.eta_right == 0 ||
      targets.chi_left == 0 || targets.chi_right == 0)
    throw ValidationError("calibration targets must be nonzero with positive frequencies");
  const bool fit_res = targets.zz_static.has_value();
  CalibrationProblem prob{targets, initial, fit_res};

  const bool have_initial = initial.left.ec > 0 && initial.left.ej > 0 && initial.right.ec > 0 &&
                            initial.right.ej > 0 && initial.coupling.g_left > 0 && initial.coupling.g_right > 0;
  double wc0 = initial.resonator.bare_freq > 0 ? initial.resonator.bare_freq
                                               : 0.5 * (targets.omega_left + targets.omega_right) + 5.0;
  Eigen::VectorXd x = heuristic_guess(targets, wc0);
  if (have_initial) {
    x << std::log(initial.left.ec), std::log(initial.left.ej), std::log(initial.right.ec), std::log(initial.right.ej),
        std::log(initial.coupling.g_left), std::log(initial.coupling.g_right), std::log(wc0);
  }
  if (!fit_res) {
    prob.base.resonator.bare_freq = wc0;
    x.conservativeResize(6);
  }

  int evals = 0;
  CalibrationFunctor fun{&prob, static_cast<int>(x.size()), fit_res ? 7 : 6, &evals};
  Eigen::NumericalDiff<CalibrationFunctor, Eigen::Central> diff(fun, 1e-6);
  double best_cost = HUGE_VAL;
  Eigen::VectorXd best = x;
  // Restarts from the best point let LM escape a stalled trust region.
  for (int r = 0; r < opt.restarts && evals < opt.max_evals; ++r) {
    Eigen::LevenbergMarquardt<decltype(diff)> lm(diff);
    lm.parameters.maxfev = opt.max_evals - evals;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-16;
    Eigen::VectorXd xr = best;
    lm.minimize(xr);
    Eigen::VectorXd fv(fun.values());
    fun(xr, fv);
    double c = fv.squaredNorm();
    if (c < best_cost) {
      best_cost = c;
      best = xr;
    }
    if (best_cost < 1e-20) break;
  }

  CalibrationResult out;
  out.spec = prob.spec_from(best);
  out.residual = best_cost;
  out.evals = evals;
  if (!(best_cost < 1e3)) throw CalibrationError("calibration: no feasible evaluation", best_cost);
  out.model = extract_dressed_params(out.spec, 3);
  Eigen::VectorXd r = prob.residuals(out.model);
  for (int i = 0; i < r.size(); ++i) {
    double tol = i < 4 ? opt.freq_rtol : opt.chi_rtol;
    if (std::abs(r[i]) > tol) {
      std::ostringstream msg;
      msg << "calibration failed: target " << i << " relative mismatch " << r[i] << " (sum of squares "
          << best_cost << ")";
      throw CalibrationError(msg.str(), best_cost);
    }
  }
  return out;
}

}  // namespace zzfree
