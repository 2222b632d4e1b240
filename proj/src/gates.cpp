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

#include "zzfree/gates.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "zzfree/errors.hpp"
#include "zzfree/optimize.hpp"

namespace zzfree {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

// |Tr(U^dag Zpost M Zpre)|^2 as a 16-term phase sum over w = conj(U) .* M.
double trace_overlap2(const Map4 &w, const LocalZ &z) {
  cplx pre[4], post[4];
  for (int k = 0; k < 4; ++k) {
    pre[k] = std::polar(1.0, z[0] * (k / 2) + z[1] * (k % 2));
    post[k] = std::polar(1.0, z[2] * (k / 2) + z[3] * (k % 2));
  }
  cplx t = 0.0;
  for (int r = 0; r < 4; ++r) {
    cplx row = 0.0;
    for (int c = 0; c < 4; ++c) row += w(r, c) * pre[c];
    t += post[r] * row;
  }
  return std::norm(t);
}

}  // namespace

Map4 local_z_matrix(double z_left, double z_right) {
  Map4 m = Map4::Zero();
  for (int k = 0; k < 4; ++k) m(k, k) = std::polar(1.0, z_left * (k / 2) + z_right * (k % 2));
  return m;
}

Map4 apply_local_z(const Map4 &map, const LocalZ &z) {
  return local_z_matrix(z[2], z[3]) * map * local_z_matrix(z[0], z[1]);
}

double average_gate_fidelity(const Map4 &map, const Map4 &target) {
  const double d = 4.0;
  return ((map.adjoint() * map).trace().real() + std::norm((target.adjoint() * map).trace())) / (d * (d + 1.0));
}

FidelityResult average_gate_fidelity(const Map4 &map, const Map4 &target, bool optimize_local_z,
                                     const std::optional<LocalZ> &warm_start) {
  FidelityResult out;
  if (!optimize_local_z) {
    out.fidelity = average_gate_fidelity(map, target);
    return out;
  }
  const Map4 w = target.conjugate().cwiseProduct(map);
  auto f = [&](const std::vector<double> &x) { return -trace_overlap2(w, {x[0], x[1], x[2], x[3]}); };
  std::vector<LocalZ> starts;
  if (warm_start) starts.push_back(*warm_start);
  // Deterministic spread of starts over the torus.
  const double h[4] = {0.5, 1.0 / 3.0, 0.2, 1.0 / 7.0};
  for (int k = 0; k < 8; ++k) {
    LocalZ s;
    for (int i = 0; i < 4; ++i) s[i] = 2.0 * kPi * std::fmod(h[i] * (k + 1) * (i + 1.618), 1.0);
    starts.push_back(s);
  }
  starts.push_back({0, 0, 0, 0});
  NelderMeadOptions opt;
  opt.max_evals = 600;
  opt.ftol = 1e-16;
  double best = -1.0;
  for (const auto &s : starts) {
    auto r = nelder_mead(f, {s[0], s[1], s[2], s[3]}, {0.4, 0.4, 0.4, 0.4}, opt);
    if (-r.value > best + 1e-15) {
      best = -r.value;
      for (int i = 0; i < 4; ++i) out.z[i] = wrap_pi(r.x[i]);
    }
    if (warm_start && best > 16.0 * (1.0 - 1e-9)) break;
  }
  out.fidelity = average_gate_fidelity(apply_local_z(map, out.z), target);
  return out;
}

double channel_fidelity(const LindbladResult &channel, const Map4 &target, const LocalZ &z) {
  const Map4 pre = local_z_matrix(z[0], z[1]), post = local_z_matrix(z[2], z[3]);
  cplx fe = 0.0;
  double p = 0.0;
  for (int i = 0; i < 4; ++i) {
    p += channel.chi[i][i].trace().real();
    for (int j = 0; j < 4; ++j) {
      Map4 e = pre(i, i) * std::conj(pre(j, j)) * (post * channel.chi[i][j] * post.adjoint());
      fe += target.col(i).dot(e * target.col(j));
    }
  }
  return (4.0 * fe.real() / 16.0 + p / 4.0) / 5.0;
}

Map4 target_cnot(bool zero_controlled) {
  Map4 u = Map4::Zero();
  if (zero_controlled) {
    u(0, 1) = u(1, 0) = 1.0;
    u(2, 2) = u(3, 3) = 1.0;
  } else {
    u(0, 0) = u(1, 1) = 1.0;
    u(2, 3) = u(3, 2) = 1.0;
  }
  return u;
}

Map4 target_cz() {
  Map4 u = Map4::Identity();
  u(3, 3) = -1.0;
  return u;
}

std::string flavor_name(CRFlavor f) { return f == CRFlavor::ZeroControlled ? "zero" : "one"; }

CRFlavor parse_flavor(const std::string &name) {
  if (name == "zero" || name == "0" || name == "zero-controlled") return CRFlavor::ZeroControlled;
  if (name == "one" || name == "1" || name == "one-controlled") return CRFlavor::OneControlled;
  throw ValidationError("flavor must be zero or one, got '" + name + "'");
}

void CRGateSpec::validate(const DressedModel &model) const {
  if (!(duration > 0)) throw ValidationError("CR duration must be positive");
  if (std::abs(drive_freq - model.omega_right) > 0.2)
    throw ValidationError("CR drive frequency must lie within 0.2 GHz of the target qubit");
  if (!std::isfinite(cr_peak) || !std::isfinite(cancel_peak) || !std::isfinite(cancel_phase))
    throw ValidationError("CR amplitudes and phase must be finite");
  rip_drive.validate(model.chi_left, model.chi_right);
}

void CZGateSpec::validate(const DressedModel &model) const {
  if (exponent < 2 || exponent > 32 || exponent % 2 != 0) throw ValidationError("CZ exponent must be even, 2..32");
  if (duration < cz_min_duration(model) * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "CZ duration " << duration << " ns is below the minimum " << cz_min_duration(model) << " ns";
    throw ValidationError(msg.str());
  }
  rip_drive.validate(model.chi_left, model.chi_right);
}

DriveParams rip_working_point(const DressedModel &model, double detuning, const SimConfig &sim) {
  return {solve_cancellation_spectral(model, detuning, sim), detuning};
}

DriveSet cr_drives(const DressedModel &model, const CRGateSpec &spec) {
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::constant(spec.rip_drive.amplitude), spec.rip_drive.detuning};
  const double sigma = spec.duration / 4.0;
  auto tone = [&](Qubit q, double peak, double phase, double eta, bool drag) {
    PulseEnvelope env = PulseEnvelope::truncated_gaussian(peak, sigma, spec.duration);
    env.carrier = spec.drive_freq;
    env.phase = phase;
    if (drag) {
      auto [in, quad] = drag_pair(env, eta);
      ds.qubit.push_back({q, in});
      ds.qubit.push_back({q, quad});
    } else {
      ds.qubit.push_back({q, env});
    }
  };
  tone(Qubit::Left, spec.cr_peak, 0.0, model.eta_left, spec.drag == DragPlacement::Both);
  tone(Qubit::Right, spec.cancel_peak, spec.cancel_phase, model.eta_right, spec.drag != DragPlacement::None);
  return ds;
}

namespace {

void fill_map_metrics(GateResult &r, const Map4 &target, const std::optional<LocalZ> &warm) {
  FidelityResult f = average_gate_fidelity(r.map, target, true, warm);
  r.avg_fidelity = f.fidelity;
  r.coherent_error = std::max(0.0, 1.0 - f.fidelity);
  r.local_z = f.z;
  r.leakage = std::max(0.0, 1.0 - (r.map.adjoint() * r.map).trace().real() / 4.0);
  const Map4 aligned = apply_local_z(r.map, f.z);
  const double global = std::arg((target.adjoint() * aligned).trace());
  for (int k = 0; k < 4; ++k) r.phase_errors[k] = wrap_pi(std::arg(target.col(k).dot(aligned.col(k))) - global);
  const auto d = r.map.diagonal();
  r.conditional_phase = std::arg(d(0) * d(3) * std::conj(d(1) * d(2)));
}

void fill_noise(GateResult &r, const DressedModel &model, const DriveSet &ds, const FrameSpec &frame,
                const SimConfig &sim, const NoiseSpec &noise, double T, const Map4 &target) {
  LindbladResult ch = lindblad_propagate(model, ds, frame, sim, noise, T);
  auto f = [&](const std::vector<double> &x) { return -channel_fidelity(ch, target, {x[0], x[1], x[2], x[3]}); };
  NelderMeadOptions opt;
  opt.max_evals = 300;
  opt.ftol = 1e-16;
  auto best = nelder_mead(f, {r.local_z[0], r.local_z[1], r.local_z[2], r.local_z[3]}, {0.01, 0.01, 0.01, 0.01}, opt);
  r.total_error = std::max(r.coherent_error, 1.0 + best.value);
}

double second_level_population(const PropagationResult &p, int levels_right) {
  if (levels_right < 3 || p.populations.empty()) return 0.0;
  const RMat &pop = p.populations.back();
  double worst = 0.0;
  for (int c = 0; c < pop.cols(); ++c) {
    double s = 0.0;
    for (int q = 0; q < pop.rows(); ++q)
      if (q % levels_right == 2) s += pop(q, c);
    worst = std::max(worst, s);
  }
  return worst;
}

FrameSpec displaced_frame(std::optional<double> qubit_frame) {
  FrameSpec f;
  f.kind = FrameKind::Displaced;
  f.rotating_wave = true;
  f.qubit_frame = qubit_frame;
  return f;
}

GateResult simulate_cr_impl(const DressedModel &model, const CRGateSpec &spec, const SimConfig &sim,
                            const std::optional<NoiseSpec> &noise, const std::optional<LocalZ> &warm) {
  spec.validate(model);
  DriveSet ds = cr_drives(model, spec);
  FrameSpec frame = displaced_frame(spec.drive_freq);
  SubspaceMap sm = propagate_subspace_map(model, ds, frame, sim, spec.duration);
  GateResult r;
  r.map = sm.map;
  const Map4 target = target_cnot(spec.flavor == CRFlavor::ZeroControlled);
  fill_map_metrics(r, target, warm);
  r.target_second_level = second_level_population(sm.raw, sim.levels_right);
  r.trace = std::move(sm.raw);
  if (noise) fill_noise(r, model, ds, frame, sim, *noise, spec.duration, target);
  return r;
}

// Integral of a unit-peak envelope over its support (Simpson).
double envelope_area(PulseEnvelope env) {
  env.amplitude = 1.0;
  const int n = 2000;
  const double T = env.support_end(), h = T / n;
  double s = evaluate(env, 0.0) + evaluate(env, T);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * evaluate(env, k * h);
  return s * h / 3.0;
}

}  // namespace

GateResult simulate_cr_gate(const DressedModel &model, const CRGateSpec &spec, const SimConfig &sim,
                            const std::optional<NoiseSpec> &noise) {
  return simulate_cr_impl(model, spec, sim, noise, std::nullopt);
}

CRGateSpec cr_seed(const DressedModel &model, double duration, CRFlavor flavor, const DriveParams &rip) {
  // Rates on the target transition, per unit amplitude, for each control state:
  // CR tone a0 (control 0) and a1 (control 1); cancel tone c0, c1.
  const double a0 = model.coeff("left", "A_R").real();
  const double a1 = a0 + model.coeff("left", "A_CX").real();
  const double c0 = model.coeff("right", "A_R").real();
  const double c1 = c0 + model.coeff("right", "A_CX").real();
  CRGateSpec s;
  s.flavor = flavor;
  s.duration = duration;
  s.rip_drive = rip;
  s.drive_freq = model.omega_right + stark_shifts(rip, model).second;
  // The cancel tone nulls the branch that must stay idle; the other branch
  // then needs a rotation area of 1/4.
  double ratio, rate;
  if (flavor == CRFlavor::ZeroControlled) {
    ratio = -a1 / c1;
    rate = a0 + ratio * c0;
  } else {
    ratio = -a0 / c0;
    rate = a1 + ratio * c1;
  }
  const double area = envelope_area(PulseEnvelope::truncated_gaussian(1.0, duration / 4.0, duration));
  s.cr_peak = 1.0 / (4.0 * std::abs(rate) * area);
  s.cancel_peak = std::abs(ratio) * s.cr_peak;
  s.cancel_phase = ratio >= 0 ? 0.0 : kPi;
  return s;
}

CROptimization optimize_cr_gate(const DressedModel &model, double duration, CRFlavor flavor, const SimConfig &sim,
                                const CROptimizeOptions &opt, std::optional<DriveParams> rip) {
  if (duration < 30.0 || duration > 60.0) throw ValidationError("CR optimization supports durations of 30-60 ns");
  const DriveParams point = rip ? *rip : rip_working_point(model, 0.1, sim);
  const CRGateSpec base = cr_seed(model, duration, flavor, point);
  auto make = [&](const std::vector<double> &x) {
    CRGateSpec s = base;
    s.drive_freq = x[0];
    s.cr_peak = x[1];
    s.cancel_peak = x[2];
    s.cancel_phase = x[3];
    return s;
  };
  std::optional<LocalZ> warm;
  CROptimization out;
  double best = HUGE_VAL;
  std::vector<double> best_x;
  auto objective = [&](const std::vector<double> &x) {
    ++out.evals;
    try {
      GateResult r = simulate_cr_impl(model, make(x), sim, std::nullopt, warm);
      if (r.coherent_error < best) {
        best = r.coherent_error;
        best_x = x;
        warm = r.local_z;
      }
      return r.coherent_error;
    } catch (const std::exception &) {
      return 1.0;
    }
  };
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<double> x0 = {base.drive_freq, base.cr_peak, base.cancel_peak, base.cancel_phase};
  const std::vector<double> steps = {0.003, 0.05 * base.cr_peak, 0.2 * base.cancel_peak + 1e-4, 0.2};
  NelderMeadOptions nm;
  nm.max_evals = opt.max_evals;
  nm.ftol = 1e-10;
  nm.xtol = 1e-9;
  for (int k = 0; k < opt.restarts; ++k) {
    std::vector<double> start = x0;
    if (k > 0) {
      start[0] += 0.002 * u(rng);
      start[1] *= 1.0 + 0.05 * u(rng);
      start[2] *= 1.0 + 0.1 * u(rng);
      start[3] += 0.1 * u(rng);
    }
    auto r = nelder_mead(objective, start, steps, nm);
    out.seed_errors.push_back(r.value);
  }
  if (best_x.empty() || best > 1e-3) {
    std::ostringstream msg;
    msg << "CR optimization stalled at coherent error " << best;
    throw CalibrationError(msg.str(), best);
  }
  out.spec = make(best_x);
  out.result = simulate_cr_impl(model, out.spec, sim, std::nullopt, warm);
  return out;
}

double cz_min_duration(const DressedModel &model) {
  if (model.zz_static == 0.0) throw ValidationError("CZ needs a nonzero static ZZ");
  return 1.0 / (2.0 * std::abs(model.zz_static));
}

namespace {

DriveSet cz_drives(const CZGateSpec &spec) {
  DriveSet ds;
  ds.resonator = ResonatorDrive{PulseEnvelope::adiabatic_poly(spec.rip_drive.amplitude, spec.exponent, spec.duration),
                                spec.rip_drive.detuning};
  return ds;
}

}  // namespace

GateResult simulate_cz_gate(const DressedModel &model, const CZGateSpec &spec, const SimConfig &sim,
                            const std::optional<NoiseSpec> &noise) {
  spec.validate(model);
  DriveSet ds = cz_drives(spec);
  FrameSpec frame = displaced_frame(std::nullopt);
  SubspaceMap sm = propagate_subspace_map(model, ds, frame, sim, spec.duration);
  GateResult r;
  r.map = sm.map;
  fill_map_metrics(r, target_cz(), std::nullopt);
  // Without qubit drives every loss from the computational block is
  // resonator excitation left by the ramp.
  r.diabatic_error = r.leakage;
  r.target_second_level = second_level_population(sm.raw, sim.levels_right);
  r.trace = std::move(sm.raw);
  if (noise) fill_noise(r, model, ds, frame, sim, *noise, spec.duration, target_cz());
  return r;
}

CZOptimization optimize_cz_duration(const DressedModel &model, int exponent, const SimConfig &sim,
                                    std::optional<DriveParams> rip) {
  const DriveParams point = rip ? *rip : rip_working_point(model, 0.1, sim);
  CZGateSpec spec{exponent, 0.0, point};
  CZOptimization out;
  auto phase_at = [&](double T) {
    ++out.evals;
    spec.duration = T;
    DriveSet ds = cz_drives(spec);
    SubspaceMap sm = propagate_subspace_map(model, ds, displaced_frame(std::nullopt), sim, T);
    const auto d = sm.map.diagonal();
    return std::arg(d(0) * d(3) * std::conj(d(1) * d(2)));
  };
  const double tmin = cz_min_duration(model);
  double t_lo = tmin, prev = phase_at(tmin);
  double t_hi = 0.0, phi_hi = 0.0;
  // The phase moves by at most 2 pi |zz| per ns, far below pi over a 4 ns step.
  for (double T = tmin + 4.0; T < 20.0 * tmin; T += 4.0) {
    double phi = prev + std::remainder(phase_at(T) - prev, 2.0 * kPi);
    if (std::abs(phi) >= kPi) {
      t_hi = T;
      phi_hi = phi;
      break;
    }
    t_lo = T;
    prev = phi;
  }
  if (t_hi == 0.0) throw NumericalError("conditional phase never reached pi");
  // Bisection on |phi| - pi, continuing the unwrapped branch.
  double phi_lo = prev;
  for (int it = 0; it < 60 && t_hi - t_lo > 1e-5; ++it) {
    const double tm = 0.5 * (t_lo + t_hi);
    double phi = phi_lo + std::remainder(phase_at(tm) - phi_lo, 2.0 * kPi);
    if (std::abs(phi) >= kPi) {
      t_hi = tm;
      phi_hi = phi;
    } else {
      t_lo = tm;
      phi_lo = phi;
    }
    if (std::abs(std::abs(phi) - kPi) < 1e-9) break;
  }
  (void)phi_hi;
  spec.duration = 0.5 * (t_lo + t_hi);
  out.duration = spec.duration;
  out.result = simulate_cz_gate(model, spec, sim);
  return out;
}

Dephasing resonator_dephasing(double chi, double detuning, double kappa, double photons) {
  if (kappa < 0 || photons < 0) throw ValidationError("kappa and photon number must be non-negative");
  if (detuning == 0.0) throw ValidationError("dephasing estimate needs a nonzero detuning");
  // Angular rates in 1/us.
  const double c = kTwoPi * 1e3 * chi, d = kTwoPi * 1e3 * detuning;
  Dephasing out;
  out.rate = 2.0 * photons * kappa * c * c / (kappa * kappa + c * c + 4.0 * d * d);
  out.prefactor = photons * chi * chi / (2.0 * detuning * detuning);
  out.rate_limit = out.prefactor * kappa;
  return out;
}

ErrorBudget error_budget(const DressedModel &model, const CRGateSpec &spec, const NoiseSpec &noise) {
  noise.validate();
  ErrorBudget b;
  b.eps_cx = model.coeff("left", "A_CX").real() * spec.cr_peak;
  if (b.eps_cx == 0.0) throw ValidationError("degenerate drive: conditional rotation rate is zero");
  double sum = 0.0;
  int count = 0;
  for (double t : {noise.t1_left, noise.t1_right, noise.t2_left, noise.t2_right})
    if (t > 0) {
      sum += 1.0 / t;
      ++count;
    }
  b.gamma = count ? sum / count : 0.0;
  b.err_noise = 4.0 * kPi * b.gamma / (5.0 * kTwoPi * 1e3 * std::abs(b.eps_cx));
  b.err_zz_ratio = std::pow(model.zz_static / b.eps_cx, 2);
  b.j_estimate = j_estimate(model);
  const double eta = 0.5 * (model.eta_left + model.eta_right), d = model.detuning_lr;
  b.chi_prime_estimate = 4.0 * b.j_estimate * b.j_estimate * eta / ((d + eta) * (d - eta));
  b.a_cx_estimate = a_cx_estimate(model);
  const double photons = noise.photons > 0 ? noise.photons : spec.rip_drive.photons();
  b.dephasing_left = resonator_dephasing(model.chi_left, spec.rip_drive.detuning, noise.kappa, photons);
  b.dephasing_right = resonator_dephasing(model.chi_right, spec.rip_drive.detuning, noise.kappa, photons);
  auto limit = [](double r) { return r > 0 ? 1.0 / r : HUGE_VAL; };
  b.coherence_limit_left = limit(b.dephasing_left.rate);
  b.coherence_limit_right = limit(b.dephasing_right.rate);
  return b;
}

}  // namespace zzfree
