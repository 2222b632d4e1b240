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

#include "zzfree/dynamics.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "zzfree/errors.hpp"
#include "zzfree/optimize.hpp"

namespace zzfree {

namespace {

constexpr cplx kI(0.0, 1.0);

// Bosonic lowering operator on a qubit register of `levels` levels.
RMat qubit_lowering(int levels) { return annihilation(levels); }

// Dressed charge operator restricted to the simulated qubit levels. Falls
// back to the expansion coefficients when the model carries no matrices.
RMat drive_matrix(const DressedModel &m, Qubit q, int ll, int lr) {
  const RMat &full = q == Qubit::Left ? m.drive_left : m.drive_right;
  RMat out = RMat::Zero(ll * lr, ll * lr);
  if (m.drive_levels > 0 && full.size() > 0) {
    if (ll > m.drive_levels || lr > m.drive_levels)
      throw ValidationError("simulated qubit levels exceed the levels of the dressed drive matrices");
    for (int a = 0; a < ll * lr; ++a)
      for (int b = 0; b < ll * lr; ++b)
        out(a, b) = full((a / lr) * m.drive_levels + a % lr, (b / lr) * m.drive_levels + b % lr);
    return out;
  }
  // Expansion form with harmonic ladder operators.
  const bool left = q == Qubit::Left;
  const auto &coeffs = left ? m.drive_coeffs_left : m.drive_coeffs_right;
  auto c = [&](const std::string &name) {
    for (const auto &x : coeffs)
      if (x.label == name) return x.value.real();
    return 0.0;
  };
  RMat bl = kron(qubit_lowering(ll), RMat::Identity(lr, lr));
  RMat br = kron(RMat::Identity(ll, ll), qubit_lowering(lr));
  RMat self = left ? bl : br, other = left ? br : bl;
  std::string s = left ? "L" : "R", o = left ? "R" : "L";
  RMat lower = c("A_" + s) * self + c("A_" + o) * other +
               c("A_CX") * self.transpose() * self * other +
               c("A'_" + o) * other.transpose() * other * other +
               c("A'_CX") * self.transpose() * self * other.transpose() * other * other;
  return lower + lower.transpose();
}

// Total-excitation change of each qubit between basis states a <- b.
std::pair<int, int> level_change(int a, int b, int lr) { return {a / lr - b / lr, a % lr - b % lr}; }

}  // namespace

ModelHamiltonian::ModelHamiltonian(const DressedModel &m, const DriveSet &drives, const FrameSpec &frame,
                                   const SimConfig &sim)
    : sim_(sim), rdrive_(drives.resonator), kind_(frame.kind) {
  if (!(sim.dt > 0)) throw ValidationError("sim dt must be positive");
  if (sim.levels_left < 2 || sim.levels_right < 2) throw ValidationError("at least 2 levels per transmon");
  const int ll = sim.levels_left, lr = sim.levels_right, nf = sim.res_dim;
  dim_ = ll * lr * nf;

  double peak_alpha = 0.0;
  if (rdrive_) {
    if (rdrive_->detuning == 0.0) throw ValidationError("resonator drive detuning must be nonzero");
    double peak = std::abs(rdrive_->envelope.amplitude);
    peak_alpha = peak / std::abs(rdrive_->detuning);
  }
  const double nbar = peak_alpha * peak_alpha;
  if (frame.kind == FrameKind::Displaced) {
    if (!rdrive_) throw ValidationError("displaced frame requires a resonator drive");
    if (nf < 5) throw ValidationError("displaced frame needs resonator dimension >= 5");
  } else if (nf < nbar + 6.0 * std::sqrt(nbar) + 5.0) {
    std::ostringstream msg;
    msg << "resonator dimension " << nf << " too small for " << nbar << " photons (need n + 6 sqrt(n) + 5)";
    throw ValidationError(msg.str());
  }
  if (frame.kind == FrameKind::Rotating && !rdrive_) throw ValidationError("rotating frame requires a resonator drive carrier");

  // Qubit frame frequencies.
  if (frame.qubit_frame) {
    frame_left_ = frame_right_ = *frame.qubit_frame;
  } else if (frame.kind == FrameKind::DressedLab) {
    frame_left_ = frame_right_ = 0.0;
  } else if (!drives.qubit.empty()) {
    frame_left_ = frame_right_ = drives.qubit.front().envelope.carrier;
  } else {
    frame_left_ = m.omega_left;
    frame_right_ = m.omega_right;
  }

  const RMat il = RMat::Identity(ll, ll), ir = RMat::Identity(lr, lr), ic = RMat::Identity(nf, nf);
  RMat ra = annihilation(nf);
  a_ = kron(kron(il, ir), ra).cast<cplx>();
  nl_ = kron(kron(number_op(ll), ir), ic).cast<cplx>();
  nr_ = kron(kron(il, number_op(lr)), ic).cast<cplx>();
  const CMat ad = a_.adjoint();
  const CMat num = ad * a_;
  const CMat chin = m.chi_left * nl_ + m.chi_right * nr_;
  auto res_op = [&](int k, int l) { return kron(kron(il, ir), normal_ordered(nf, k, l)).cast<cplx>().eval(); };

  // Static qubit part, Kerr form.
  h0_ = CMat::Zero(dim_, dim_);
  for (int jl = 0; jl < ll; ++jl)
    for (int jr = 0; jr < lr; ++jr)
      for (int n = 0; n < nf; ++n) {
        double e = (m.omega_left - frame_left_) * jl + 0.5 * m.eta_left * jl * (jl - 1) +
                   (m.omega_right - frame_right_) * jr + 0.5 * m.eta_right * jr * (jr - 1) +
                   m.zz_static * jl * jr;
        h0_(index(jl, jr, n), index(jl, jr, n)) = e;
      }
  h0_ += 0.5 * m.eta_res * res_op(2, 2) + chin * num;

  const bool rwa = frame.rotating_wave;
  if (frame.kind == FrameKind::DressedLab) {
    h0_ += m.omega_res * num;
    if (rdrive_) {
      auto env = rdrive_->envelope;
      const double wd = m.omega_res + rdrive_->detuning;
      add_term(a_, [env, wd](double t) { return cplx(2.0 * evaluate(env, t) * std::cos(kTwoPi * wd * t)); }, true,
               true);
    }
  } else {
    const double delta = rdrive_->detuning;
    const double wd = m.omega_res + delta;
    h0_ += -delta * num;
    auto env = rdrive_->envelope;
    const bool constant = env.kind == PulseKind::Constant;
    if (!rwa)
      add_term(a_, [env, wd](double t) { return evaluate(env, t) * std::polar(1.0, -2.0 * kTwoPi * wd * t); }, true,
               true);
    if (frame.kind == FrameKind::Rotating) {
      if (constant)
        h0_ += env.amplitude * (a_ + ad);
      else
        add_term(a_, [env](double t) { return cplx(evaluate(env, t)); }, true, true);
    } else {
      // Displaced by alpha(t) = D(t)/delta; the linear drive term cancels.
      const double ec = m.eta_res;
      const CMat x = a_ + ad;
      const CMat cubic = res_op(2, 1) + res_op(1, 2);
      const CMat quad = res_op(2, 0) + res_op(0, 2) + 4.0 * num;
      // chi n (alpha x + alpha^2) + eta_C/2 [2 alpha cubic + alpha^2 quad + 2 alpha^3 x]
      CMat lin = chin * x + ec * cubic;
      CMat sq = chin + 0.5 * ec * quad;
      CMat cube = ec * x;
      if (constant) {
        double al = env.amplitude / delta;
        h0_ += al * lin + al * al * sq + al * al * al * cube;
      } else {
        auto alpha = [env, delta](double t) { return evaluate(env, t) / delta; };
        add_term(lin, [alpha](double t) { return cplx(alpha(t)); }, false, true);
        add_term(sq, [alpha](double t) { return cplx(alpha(t) * alpha(t)); }, false, true);
        add_term(cube, [alpha](double t) { double v = alpha(t); return cplx(v * v * v); }, false, true);
        // Frame motion: -i alpha'(t) (a^dag - a) / 2pi.
        add_term(ad, [env, delta](double t) { return -kI * derivative(env, t) / (delta * kTwoPi); }, true, false);
      }
    }
  }

  // Qubit drives, split into blocks of fixed level change.
  for (const auto &qd : drives.qubit) {
    RMat op = drive_matrix(m, qd.target, ll, lr);
    std::map<std::pair<int, int>, RMat> blocks;
    for (int a = 0; a < ll * lr; ++a)
      for (int b = 0; b < ll * lr; ++b) {
        if (op(a, b) == 0.0) continue;
        auto d = level_change(a, b, lr);
        auto &blk = blocks[d];
        if (blk.size() == 0) blk = RMat::Zero(ll * lr, ll * lr);
        blk(a, b) = op(a, b);
      }
    auto env = qd.envelope;
    const double fl = frame_left_, fr = frame_right_;
    for (const auto &[d, blk] : blocks) {
      const int total = d.first + d.second;
      const bool lowering = total < 0 || (total == 0 && d.first < 0);
      const double rot = fl * d.first + fr * d.second;  // frame phase rate of this block
      CMat full = kron(blk, RMat::Identity(nf, nf)).cast<cplx>();
      if (rwa) {
        if (total != -1) continue;
        add_term(full, [env, rot](double t) {
          return evaluate(env, t) * std::polar(1.0, kTwoPi * (env.carrier + rot) * t + env.phase);
        }, true, false);
      } else if (d.first == 0 && d.second == 0) {
        add_term(full, [env](double t) {
          return cplx(2.0 * evaluate(env, t) * std::cos(kTwoPi * env.carrier * t + env.phase));
        }, false, false);
      } else if (lowering) {
        add_term(full, [env, rot](double t) {
          return 2.0 * evaluate(env, t) * std::cos(kTwoPi * env.carrier * t + env.phase) *
                 std::polar(1.0, kTwoPi * rot * t);
        }, true, false);
      }
    }
  }
}

void ModelHamiltonian::add_term(CMat op, std::function<cplx(double)> coeff, bool add_adjoint, bool drift) {
  Term term{{}, std::move(coeff), add_adjoint, drift};
  for (int c = 0; c < op.cols(); ++c)
    for (int r = 0; r < op.rows(); ++r)
      if (op(r, c) != 0.0) term.op.push_back({r, c, op(r, c)});
  terms_.push_back(std::move(term));
}

namespace {

void accumulate(CMat &h, const std::vector<ModelHamiltonian::Entry> &op, cplx c, bool add_adjoint) {
  for (const auto &e : op) {
    const cplx v = c * e.value;
    h(e.row, e.col) += v;
    if (add_adjoint) h(e.col, e.row) += std::conj(v);
  }
}

}  // namespace

double ModelHamiltonian::alpha(double t) const {
  if (kind_ != FrameKind::Displaced || !rdrive_) return 0.0;
  return evaluate(rdrive_->envelope, t) / rdrive_->detuning;
}

CMat ModelHamiltonian::at(double t) const {
  CMat h = h0_;
  for (const auto &term : terms_) {
    cplx c = term.coeff(t);
    if (c != 0.0) accumulate(h, term.op, c, term.add_adjoint);
  }
  return h;
}

CMat ModelHamiltonian::drift_at(double t) const {
  CMat h = h0_;
  for (const auto &term : terms_) {
    if (!term.drift) continue;
    cplx c = term.coeff(t);
    if (c != 0.0) accumulate(h, term.op, c, term.add_adjoint);
  }
  return h;
}

CMat reference_states(const ModelHamiltonian &h, const std::vector<std::array<int, 2>> &labels, double t) {
  const SimConfig &sim = h.sim();
  const CMat hd = h.drift_at(t);
  Eigen::SelfAdjointEigenSolver<CMat> es(hd);
  if (es.info() != Eigen::Success) throw NumericalError("drift diagonalization failed");
  CMat out(h.dim(), static_cast<Eigen::Index>(labels.size()));
  for (size_t c = 0; c < labels.size(); ++c) {
    const int jl = labels[c][0], jr = labels[c][1];
    if (jl < 0 || jr < 0 || jl >= sim.levels_left || jr >= sim.levels_right)
      throw ValidationError("reference label outside truncation");
    // Target |jl, jr> times the frame vacuum. In the rotating frame the
    // drift holds the drive, so the vacuum is a coherent state whose
    // amplitude follows from the linear term.
    const int i0 = h.index(jl, jr, 0), i1 = h.index(jl, jr, 1);
    const cplx lin = hd(i0, i1), gap = hd(i1, i1) - hd(i0, i0);
    const double beta = std::abs(lin) > 1e-14 && std::abs(gap) > 1e-14 ? -(lin / gap).real() : 0.0;
    CVec target = CVec::Zero(h.dim());
    double amp = std::exp(-0.5 * beta * beta);
    for (int n = 0; n < sim.res_dim; ++n) {
      target(h.index(jl, jr, n)) = amp;
      amp *= beta / std::sqrt(static_cast<double>(n + 1));
    }
    target.normalize();
    Eigen::VectorXcd ov = es.eigenvectors().adjoint() * target;
    Eigen::Index k;
    const double w = ov.cwiseAbs2().maxCoeff(&k);
    if (w <= 0.5) {
      std::ostringstream msg;
      msg << "reference state for |" << jl << jr << "> has overlap " << w << " <= 0.5 with the frame vacuum";
      throw AmbiguousDressingError(msg.str());
    }
    out.col(c) = es.eigenvectors().col(k) * (std::conj(ov(k)) / std::abs(ov(k)));
  }
  return out;
}

CVec reference_state(const ModelHamiltonian &h, int jl, int jr, double t) {
  return reference_states(h, {{jl, jr}}, t).col(0);
}

namespace {

double wrap_to(double phase, double near) {
  return phase + kTwoPi * std::round((near - phase) / kTwoPi);
}

CMat exp_apply(const CMat &h, double dt, const CMat &psi) { return expmv_hermitian(h, dt, psi); }

struct Stepper {
  const ModelHamiltonian &h;
  Integrator kind;

  void step(CMat &psi, double t, double dt) const {
    switch (kind) {
      case Integrator::Magnus2:
        psi = exp_apply(h.at(t + 0.5 * dt), dt, psi);
        break;
      case Integrator::Magnus4: {
        static const double s3 = std::sqrt(3.0);
        const double c1 = 0.5 - s3 / 6.0, c2 = 0.5 + s3 / 6.0;
        const double b1 = 0.25 + s3 / 6.0, b2 = 0.25 - s3 / 6.0;
        CMat h1 = h.at(t + c1 * dt), h2 = h.at(t + c2 * dt);
        psi = exp_apply(b1 * h1 + b2 * h2, dt, psi);
        psi = exp_apply(b2 * h1 + b1 * h2, dt, psi);
        break;
      }
      case Integrator::AdaptiveRK:
        break;
    }
  }
};

}  // namespace

PropagationResult propagate(const ModelHamiltonian &h, const CMat &initial, double T,
                            const std::vector<std::array<int, 2>> &labels) {
  const SimConfig &sim = h.sim();
  if (T < 0) throw ValidationError("propagation time must be non-negative");
  if (initial.rows() != h.dim()) throw ValidationError("initial state dimension mismatch");
  for (int c = 0; c < initial.cols(); ++c)
    if (std::abs(initial.col(c).norm() - 1.0) > 1e-10) throw ValidationError("initial state not normalized");
  if (!labels.empty() && labels.size() != static_cast<size_t>(initial.cols()))
    throw ValidationError("one label per initial column required");

  const int cols = static_cast<int>(initial.cols());
  const int steps = T > 0 ? std::max(1, static_cast<int>(std::ceil(T / sim.dt - 1e-9))) : 0;
  const double dt = steps > 0 ? T / steps : 0.0;
  const int ll = sim.levels_left, lr = sim.levels_right, nf = sim.res_dim;

  const CMat ref0 = labels.empty() ? CMat() : reference_states(h, labels, 0.0);
  std::vector<double> tracked(labels.size(), 0.0);
  for (size_t k = 0; k < labels.size(); ++k) tracked[k] = std::arg(ref0.col(k).dot(initial.col(k)));

  PropagationResult out;
  auto populations = [&](const CMat &psi) {
    RMat p = RMat::Zero(ll * lr, cols);
    for (int c = 0; c < cols; ++c)
      for (int q = 0; q < ll * lr; ++q) p(q, c) = psi.col(c).segment(q * nf, nf).squaredNorm();
    return p;
  };
  auto boundary = [&](const CMat &psi) {
    double worst = 0.0;
    for (int c = 0; c < cols; ++c) {
      double s = 0.0;
      for (int q = 0; q < ll * lr; ++q) s += std::norm(psi(q * nf + nf - 1, c));
      worst = std::max(worst, s);
    }
    return worst;
  };
  auto track = [&](const CMat &psi) {
    for (size_t k = 0; k < labels.size(); ++k) tracked[k] = wrap_to(std::arg(ref0.col(k).dot(psi.col(k))), tracked[k]);
  };
  auto sample = [&](double t, const CMat &psi) {
    out.times.push_back(t);
    out.populations.push_back(populations(psi));
  };

  CMat psi = initial;
  out.boundary_population = boundary(psi);
  if (sim.sample_every > 0) sample(0.0, psi);

  if (h.is_constant()) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h.at(0.0));
    if (es.info() != Eigen::Success) throw NumericalError("Hamiltonian diagonalization failed");
    const CMat &v = es.eigenvectors();
    const CMat c0 = v.adjoint() * initial;
    // Without sampling, step only as finely as phase unwrapping requires.
    int csteps = steps;
    if (sim.sample_every == 0 && steps > 0)
      csteps = std::min(steps, 1 + static_cast<int>(std::ceil(4.0 * T * es.eigenvalues().cwiseAbs().maxCoeff())));
    const double cdt = csteps > 0 ? T / csteps : 0.0;
    for (int s = 1; s <= csteps; ++s) {
      const double t = s * cdt;
      CVec ph = (es.eigenvalues() * (-kTwoPi * t)).unaryExpr([](double x) { return std::polar(1.0, x); });
      psi = v * (ph.asDiagonal() * c0);
      track(psi);
      out.boundary_population = std::max(out.boundary_population, boundary(psi));
      if (sim.sample_every > 0 && (s % sim.sample_every == 0 || s == csteps)) sample(t, psi);
    }
  } else if (sim.integrator == Integrator::AdaptiveRK) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<cplx>;
    const int dim = h.dim();
    State x(psi.data(), psi.data() + psi.size());
    auto rhs = [&](const State &y, State &dy, double t) {
      Eigen::Map<const CMat> ym(y.data(), dim, cols);
      Eigen::Map<CMat> dym(dy.data(), dim, cols);
      dym.noalias() = (-kI * kTwoPi) * (h.at(t) * ym);
    };
    auto stepper = odeint::make_controlled(sim.rk_tolerance, sim.rk_tolerance, odeint::runge_kutta_dopri5<State>());
    for (int s = 1; s <= steps; ++s) {
      odeint::integrate_adaptive(stepper, rhs, x, (s - 1) * dt, s * dt, dt);
      psi = Eigen::Map<CMat>(x.data(), dim, cols);
      track(psi);
      out.boundary_population = std::max(out.boundary_population, boundary(psi));
      if (sim.sample_every > 0 && (s % sim.sample_every == 0 || s == steps)) sample(s * dt, psi);
    }
  } else {
    Stepper stepper{h, sim.integrator};
    for (int s = 1; s <= steps; ++s) {
      stepper.step(psi, (s - 1) * dt, dt);
      track(psi);
      out.boundary_population = std::max(out.boundary_population, boundary(psi));
      if (sim.sample_every > 0 && (s % sim.sample_every == 0 || s == steps)) sample(s * dt, psi);
    }
  }
  if (sim.sample_every == 0) sample(T, psi);

  for (int c = 0; c < cols; ++c) out.norm_drift = std::max(out.norm_drift, std::abs(psi.col(c).norm() - 1.0));
  if (out.norm_drift > sim.norm_tolerance) {
    std::ostringstream msg;
    msg << "norm drift " << out.norm_drift << " exceeds tolerance " << sim.norm_tolerance;
    throw IntegratorError(msg.str());
  }
  if (out.boundary_population > sim.truncation_tolerance) {
    std::ostringstream msg;
    msg << "population " << out.boundary_population << " reached the resonator truncation boundary";
    throw TruncationError(msg.str());
  }

  if (!labels.empty()) {
    std::vector<std::array<int, 2>> all = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    all.insert(all.end(), labels.begin(), labels.end());
    const CMat refs = reference_states(h, all, T);
    out.computational_refs = refs.leftCols(4);
    for (size_t k = 0; k < labels.size(); ++k) {
      out.phases.push_back(wrap_to(std::arg(refs.col(4 + k).dot(psi.col(k))), tracked[k]));
      double stay = 0.0;
      for (int r = 0; r < 4; ++r) stay += std::norm(refs.col(r).dot(psi.col(k)));
      out.leakage.push_back(std::max(0.0, 1.0 - stay));
    }
  }
  out.states = std::move(psi);
  return out;
}

PropagationResult propagate_state(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                  const SimConfig &sim, const CVec &initial, double T) {
  ModelHamiltonian h(model, drives, frame, sim);
  return propagate(h, initial, T);
}

namespace {

const std::vector<std::array<int, 2>> kComputational = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};

CMat computational_inputs(const ModelHamiltonian &h) {
  return reference_states(h, kComputational, 0.0);
}

DriveSet constant_drive(const DriveParams &drive) {
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::constant(drive.amplitude), drive.detuning};
  return ds;
}

}  // namespace

double controlled_phase(const DressedModel &model, const DriveParams &drive, const FrameSpec &frame,
                        const SimConfig &sim, double tau) {
  if (tau < 0) throw ValidationError("tau must be non-negative");
  if (tau == 0) return 0.0;
  if (frame.kind == FrameKind::DressedLab && drive.amplitude != 0.0)
    throw ValidationError("lab-frame controlled phase needs a ramped drive; use propagate directly");
  FrameSpec f = frame;
  DriveSet ds = constant_drive(drive);
  ModelHamiltonian h(model, ds, f, sim);
  PropagationResult r = propagate(h, computational_inputs(h), tau, kComputational);
  for (double l : r.leakage)
    if (l > sim.leakage_tolerance) {
      std::ostringstream msg;
      msg << "leakage " << l << " invalidates the controlled-phase reading";
      throw LeakageError(msg.str());
    }
  return r.phases[2] + r.phases[1] - r.phases[0] - r.phases[3];
}

SubspaceMap propagate_subspace_map(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                   const SimConfig &sim, double T) {
  ModelHamiltonian h(model, drives, frame, sim);
  PropagationResult r = propagate(h, computational_inputs(h), T, kComputational);
  SubspaceMap out;
  out.map = r.computational_refs.adjoint() * r.states;
  out.leakage = std::max(0.0, 1.0 - (out.map.adjoint() * out.map).trace().real() / 4.0);
  out.raw = std::move(r);
  return out;
}

void NoiseSpec::validate() const {
  for (double v : {t1_left, t1_right, t2_left, t2_right, kappa, photons})
    if (v < 0 || !std::isfinite(v)) throw ValidationError("noise parameters must be finite and non-negative");
  if ((t1_left > 0 && t2_left > 2 * t1_left) || (t1_right > 0 && t2_right > 2 * t1_right))
    throw ValidationError("T2 must not exceed 2 T1");
}

namespace {

struct Dissipator {
  std::vector<CMat> jumps;
  std::vector<std::function<double(double)>> displaced;  // per jump: extra identity weight (resonator)
  CMat a;
  bool empty() const { return jumps.empty(); }
};

// Jump operators in 1/ns units: sqrt(rate) * L.
std::vector<std::pair<CMat, double>> static_jumps(const ModelHamiltonian &h, const NoiseSpec &n) {
  const SimConfig &sim = h.sim();
  const int ll = sim.levels_left, lr = sim.levels_right, nf = sim.res_dim;
  const RMat il = RMat::Identity(ll, ll), ir = RMat::Identity(lr, lr), ic = RMat::Identity(nf, nf);
  std::vector<std::pair<CMat, double>> out;
  auto add_qubit = [&](double t1, double t2, const CMat &b) {
    if (t1 > 0) out.push_back({b, 1e-3 / t1});
    if (t2 > 0) {
      double gphi = 1.0 / t2 - (t1 > 0 ? 0.5 / t1 : 0.0);
      if (gphi > 1e-15) out.push_back({b.adjoint() * b, 2e-3 * gphi});
    }
  };
  add_qubit(n.t1_left, n.t2_left, kron(kron(qubit_lowering(ll), ir), ic).cast<cplx>());
  add_qubit(n.t1_right, n.t2_right, kron(kron(il, qubit_lowering(lr)), ic).cast<cplx>());
  return out;
}

void apply_dissipator(const std::vector<CMat> &ls, const CMat &sum_ldl, const CMat &rho, CMat &out) {
  out.noalias() = -0.5 * (sum_ldl * rho + rho * sum_ldl);
  for (const auto &l : ls) out.noalias() += l * rho * l.adjoint();
}

// One Strang step: half dissipator, unitary, half dissipator.
struct LindbladStepper {
  const ModelHamiltonian &h;
  const NoiseSpec &noise;
  std::vector<std::pair<CMat, double>> fixed;

  std::pair<std::vector<CMat>, CMat> jumps_at(double t) const {
    std::vector<CMat> ls;
    CMat sum = CMat::Zero(h.dim(), h.dim());
    for (const auto &[op, rate] : fixed) {
      ls.push_back(std::sqrt(rate) * op);
      sum += rate * op.adjoint() * op;
    }
    if (noise.kappa > 0) {
      const double k = 1e-3 * noise.kappa;
      CMat l = h.resonator_a() + h.alpha(t) * CMat::Identity(h.dim(), h.dim());
      ls.push_back(std::sqrt(k) * l);
      sum += k * l.adjoint() * l;
    }
    return {ls, sum};
  }

  void half_dissipate(std::vector<CMat> &rhos, double t, double half) const {
    auto [ls, sum] = jumps_at(t);
    if (ls.empty()) return;
    CMat d1(h.dim(), h.dim()), d2(h.dim(), h.dim());
    for (auto &rho : rhos) {
      apply_dissipator(ls, sum, rho, d1);
      apply_dissipator(ls, sum, d1, d2);
      rho += half * d1 + 0.5 * half * half * d2;
    }
  }

  CMat unitary(double t, double dt) const {
    static const double s3 = std::sqrt(3.0);
    const double c1 = 0.5 - s3 / 6.0, c2 = 0.5 + s3 / 6.0;
    const double b1 = 0.25 + s3 / 6.0, b2 = 0.25 - s3 / 6.0;
    if (h.is_constant()) return expm_hermitian(h.at(t), dt);
    CMat h1 = h.at(t + c1 * dt), h2 = h.at(t + c2 * dt);
    return expm_hermitian(b2 * h1 + b1 * h2, dt) * expm_hermitian(b1 * h1 + b2 * h2, dt);
  }

  void run(std::vector<CMat> &rhos, double T) const {
    const double dtmax = h.sim().dt;
    const int steps = T > 0 ? std::max(1, static_cast<int>(std::ceil(T / dtmax - 1e-9))) : 0;
    const double dt = steps > 0 ? T / steps : 0.0;
    CMat u_const;
    if (h.is_constant() && steps > 0) u_const = expm_hermitian(h.at(0.0), dt);
    for (int s = 0; s < steps; ++s) {
      const double t = s * dt;
      half_dissipate(rhos, t, 0.5 * dt);
      CMat u = h.is_constant() ? u_const : unitary(t, dt);
      for (auto &rho : rhos) rho = u * rho * u.adjoint();
      half_dissipate(rhos, t + dt, 0.5 * dt);
    }
  }
};

}  // namespace

CMat lindblad_evolve(const ModelHamiltonian &h, const NoiseSpec &noise, const CMat &rho0, double T) {
  noise.validate();
  LindbladStepper st{h, noise, static_jumps(h, noise)};
  std::vector<CMat> rhos = {rho0};
  st.run(rhos, T);
  return rhos[0];
}

LindbladResult lindblad_propagate(const DressedModel &model, const DriveSet &drives, const FrameSpec &frame,
                                  const SimConfig &sim, const NoiseSpec &noise, double T,
                                  size_t memory_cap_bytes) {
  noise.validate();
  ModelHamiltonian h(model, drives, frame, sim);
  const size_t bytes = 12 * sizeof(cplx) * static_cast<size_t>(h.dim()) * h.dim();
  if (bytes > memory_cap_bytes) {
    std::ostringstream msg;
    msg << "density-operator propagation needs " << bytes << " bytes, cap is " << memory_cap_bytes;
    throw ResourceError(msg.str());
  }
  CMat init = computational_inputs(h);
  // Upper triangle of |i><j|; the rest follows by Hermitian conjugation.
  std::vector<CMat> rhos;
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      rhos.push_back(init.col(i) * init.col(j).adjoint());
      idx.push_back({i, j});
    }
  LindbladStepper st{h, noise, static_jumps(h, noise)};
  st.run(rhos, T);

  const CMat refs = reference_states(h, kComputational, T);
  LindbladResult out;
  for (size_t k = 0; k < rhos.size(); ++k) {
    auto [i, j] = idx[k];
    Eigen::Matrix4cd m = refs.adjoint() * rhos[k] * refs;
    out.chi[i][j] = m;
    out.chi[j][i] = m.adjoint();
    if (i == j) out.trace_drift = std::max(out.trace_drift, std::abs(rhos[k].trace().real() - 1.0));
  }
  if (out.trace_drift > 1e-8) {
    std::ostringstream msg;
    msg << "trace drift " << out.trace_drift << " in Lindblad propagation";
    throw IntegratorError(msg.str());
  }
  return out;
}

double zz_spectral(const DressedModel &model, const DriveParams &drive, const SimConfig &sim) {
  FrameSpec f;
  f.kind = FrameKind::Displaced;
  DriveSet ds = constant_drive(drive);
  ModelHamiltonian h(model, ds, f, sim);
  CMat hm = h.at(0.0);
  const CMat v = reference_states(h, kComputational, 0.0);
  auto e = [&](int k) { return v.col(k).dot(hm * v.col(k)).real(); };
  return e(3) + e(0) - e(2) - e(1);
}

namespace {

// Root of f near the closed-form point, widening a +-10% bracket.
double root_near(const std::function<double(double)> &f, double seed, double tol, const char *what) {
  double lo = 0.9 * seed, hi = 1.1 * seed;
  double flo = f(lo), fhi = f(hi);
  for (int k = 0; k < 20 && (flo > 0) == (fhi > 0); ++k) {
    lo *= 0.9;
    hi *= 1.1;
    flo = f(lo);
    fhi = f(hi);
  }
  if ((flo > 0) == (fhi > 0)) throw NoCancellationPointError(std::string(what) + " shows no sign change near the closed-form point");
  return bracketed_root(f, lo, hi, tol);
}

}  // namespace

double solve_cancellation_spectral(const DressedModel &model, double detuning, const SimConfig &sim, double tol) {
  CancellationPoint seed = solve_cancellation(model, detuning);
  if (seed.amplitude == 0.0) return 0.0;
  return root_near([&](double amp) { return zz_spectral(model, {amp, detuning}, sim); }, seed.amplitude, tol,
                   "spectral ZZ");
}

double solve_cancellation_time_domain(const DressedModel &model, double detuning, const SimConfig &sim, double tau,
                                      double tol) {
  CancellationPoint seed = solve_cancellation(model, detuning);
  if (seed.amplitude == 0.0) return 0.0;
  FrameSpec f;
  f.kind = FrameKind::Displaced;
  auto phase = [&](double amp) { return controlled_phase(model, {amp, detuning}, f, sim, tau); };
  return root_near(phase, seed.amplitude, kTwoPi * tau * tol, "time-domain controlled phase");
}

}  // namespace zzfree
