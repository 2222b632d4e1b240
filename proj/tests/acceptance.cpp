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

// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   acceptance <path-to-zzfree-cli> <scratch-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zzfree/chain.hpp"
#include "zzfree/config.hpp"
#include "zzfree/gates.hpp"

using namespace zzfree;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kC1Lo = 0.26, kC1Hi = 0.28, kC1Seconds = 1.0;
constexpr double kC2Phase = 0.02, kC2Seconds = 300.0;
constexpr double kC4Coherent = 1e-4, kC4Total500 = 1.5e-4, kC4Total100Lo = 3e-4, kC4Total100Hi = 8e-4;
constexpr double kC4OptSeconds = 7200.0, kC4EvalSeconds = 600.0;
constexpr double kC5Window = 0.15, kC5Tg2 = 160.0, kC5Tg32 = 110.0;
constexpr double kC5Diab2 = 1e-4, kC5Diab32Lo = 1e-4, kC5Diab32Hi = 1e-3;
constexpr double kC6Target = 5.0, kC6Window = 0.2;  // ms
constexpr double kC7Residual = 1e-7;                // GHz (0.1 kHz)
constexpr double kC7Zz13 = 5.1e-6, kC7Zzz = 2.1e-6, kC7Factor = 3.0;

int failures = 0;

void report(int id, bool pass, const std::string &detail) {
  std::printf("criterion %d: %s | %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ConfigDocument preset(const std::string &name) { return ConfigDocument::parse(*preset_text(name), name); }

DressedModel model_of(const ConfigDocument &doc) {
  return extract_dressed_params(circuit_from_config(doc), drive_levels_from_config(doc));
}

bool in_window(double x, double target, double rel) { return std::abs(x - target) <= rel * target; }

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const ConfigDocument doc = preset("fig2");
  const DressedModel m = model_of(doc);
  const CancellationPoint cp = solve_cancellation(m, drive_detuning_from_config(doc));
  const double t = seconds_since(t0);
  report(1, cp.amplitude >= kC1Lo && cp.amplitude <= kC1Hi && t < kC1Seconds,
         fmt("D0 = %.6f GHz in [%.2f, %.2f], %.3f s (< %.0f s, model extraction included)", cp.amplitude, kC1Lo,
             kC1Hi, t, kC1Seconds));
}

void criteria2and3() {
  const auto t0 = std::chrono::steady_clock::now();
  const ConfigDocument doc = preset("fig2");
  const DressedModel m = model_of(doc);
  const SimConfig sim = sim_from_config(doc);
  const double det = drive_detuning_from_config(doc);
  const FrameSpec frame{FrameKind::Displaced, true, std::nullopt};
  const double exact = solve_cancellation_time_domain(m, det, sim, 300.0);
  bool ok = true;
  std::string detail = fmt("time-domain D0 = %.7f GHz; phi_CPh", exact);
  for (double tau : {100.0, 200.0, 300.0}) {
    const double phi = controlled_phase(m, {exact, det}, frame, sim, tau);
    ok = ok && std::abs(phi) < kC2Phase;
    detail += fmt(" %.0fns %.2e", tau, phi);
  }
  const CancellationPoint cp = solve_cancellation(m, det);
  const double at_closed_form = controlled_phase(m, {cp.amplitude, det}, frame, sim, 300.0);
  const double t = seconds_since(t0);
  ok = ok && t < kC2Seconds;
  report(2, ok, detail + fmt(" rad (< %.2f); %.1f s; closed-form D0 gives %.3f rad at 300 ns", kC2Phase, t,
                             at_closed_form));

  const double e11 = std::abs(cp.amplitude - exact), e10 = std::abs(*cp.leading_seed - exact);
  report(3, e11 < e10,
         fmt("|D0 full - exact| = %.2e < |D0 leading - exact| = %.2e (full %.6f, leading %.6f)", e11, e10,
             cp.amplitude, *cp.leading_seed));
}

void criterion4() {
  const ConfigDocument doc = preset("fig3");
  const DressedModel m = model_of(doc);
  const SimConfig sim = sim_from_config(doc);
  const CRConfig cfg = cr_from_config(doc);
  const DriveParams rip = rip_working_point(m, drive_detuning_from_config(doc), sim);
  CROptimizeOptions opt;
  opt.restarts = cfg.restarts;
  opt.max_evals = cfg.max_evals;
  opt.seed = 0;
  bool ok = true;
  std::string detail;
  for (CRFlavor f : {CRFlavor::ZeroControlled, CRFlavor::OneControlled}) {
    const auto t0 = std::chrono::steady_clock::now();
    const CROptimization o = optimize_cr_gate(m, cfg.duration, f, sim, opt, rip);
    const double t_opt = seconds_since(t0);
    NoiseSpec n500, n100;
    n500.t1_left = n500.t1_right = n500.t2_left = n500.t2_right = 500.0;
    n100.t1_left = n100.t1_right = n100.t2_left = n100.t2_right = 100.0;
    const auto t1 = std::chrono::steady_clock::now();
    const double tot500 = *simulate_cr_gate(m, o.spec, sim, n500).total_error;
    const double t_eval = seconds_since(t1);
    const double tot100 = *simulate_cr_gate(m, o.spec, sim, n100).total_error;
    const bool pass = o.result.coherent_error <= kC4Coherent && tot500 <= kC4Total500 &&
                      tot100 >= kC4Total100Lo && tot100 <= kC4Total100Hi && t_opt <= kC4OptSeconds &&
                      t_eval <= kC4EvalSeconds;
    ok = ok && pass;
    detail += fmt("%s-CNOT coherent %.2e, total %.2e @500us, %.2e @100us, opt %.0f s, eval %.1f s; ",
                  flavor_name(f).c_str(), o.result.coherent_error, tot500, tot100, t_opt, t_eval);
  }
  report(4, ok, detail + fmt("limits %.0e / %.1e / [%.0e, %.0e]", kC4Coherent, kC4Total500, kC4Total100Lo,
                             kC4Total100Hi));
}

void criterion5() {
  const ConfigDocument doc = preset("fig4");
  const DressedModel m = model_of(doc);
  const SimConfig sim = sim_from_config(doc);
  const DriveParams rip = rip_working_point(m, drive_detuning_from_config(doc), sim);
  const double tmin = cz_min_duration(m);
  const CZOptimization a = optimize_cz_duration(m, 2, sim, rip);
  const CZOptimization b = optimize_cz_duration(m, 32, sim, rip);
  const bool ok = in_window(a.duration, kC5Tg2, kC5Window) && in_window(b.duration, kC5Tg32, kC5Window) &&
                  a.result.diabatic_error < kC5Diab2 && b.result.diabatic_error >= kC5Diab32Lo &&
                  b.result.diabatic_error <= kC5Diab32Hi && a.duration >= tmin && b.duration >= tmin;
  report(5, ok,
         fmt("n=2 Tg %.2f ns (160 +/- 15%%) diabatic %.2e (< 1e-4); n=32 Tg %.2f ns (110 +/- 15%%) diabatic %.2e "
             "(in [1e-4, 1e-3]); T_min %.2f ns",
             a.duration, a.result.diabatic_error, b.duration, b.result.diabatic_error, tmin));
}

void criterion6() {
  // 10 photons, chi 6 MHz, detuning 100 MHz, 1/kappa = 100 us.
  const Dephasing d = resonator_dephasing(0.006, 0.1, 1.0 / 100.0, 10.0);
  const double ms = 1e-3 / d.rate_limit;
  report(6, in_window(ms, kC6Target, kC6Window),
         fmt("1/Gamma = %.3f ms (5 ms +/- 20%%); full Lorentzian form %.3f ms", ms, 1e-3 / d.rate));
}

void criterion7() {
  const ChainSpec c = chain_from_config(preset("appendix-a"));
  const JointZero z = find_joint_zero(c);
  const double r12 = z.residuals.two_body.at({0, 1}), r23 = z.residuals.two_body.at({1, 2});
  const double zz13 = z.residuals.two_body.at({0, 2}), zzz = z.residuals.three_body.at({0, 1, 2});
  auto within = [](double x, double ref) { return std::abs(x) >= ref / kC7Factor && std::abs(x) <= ref * kC7Factor; };
  const bool ok = std::abs(r12) < kC7Residual && std::abs(r23) < kC7Residual && within(zz13, kC7Zz13) &&
                  within(zzz, kC7Zzz);
  report(7, ok,
         fmt("D = (%.6f, %.6f) GHz; residual zz12 %.2e kHz, zz23 %.2e kHz (< 0.1); |zz13| %.2f kHz (5.1 within x3), "
             "|zzz123| %.2f kHz (2.1 within x3, sign %s)",
             z.amplitudes[0], z.amplitudes[1], r12 * 1e6, r23 * 1e6, std::abs(zz13) * 1e6, std::abs(zzz) * 1e6,
             zzz < 0 ? "-" : "+"));
}

// ---------------------------------------------------------------------------
// Criterion 8: property suites, plus every preset through the CLI twice.

struct Check {
  std::string name;
  std::function<bool()> run;
};

int run_cli(const std::string &cli, const std::string &args, const fs::path &log) {
  const std::string cmd = "\"" + cli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool same_tree(const fs::path &a, const fs::path &b) {
  std::set<std::string> na, nb;
  for (const auto &e : fs::directory_iterator(a)) na.insert(e.path().filename().string());
  for (const auto &e : fs::directory_iterator(b)) nb.insert(e.path().filename().string());
  if (na != nb || na.empty()) return false;
  for (const auto &n : na)
    if (slurp(a / n) != slurp(b / n)) return false;
  return true;
}

bool presets_rerun_identically(const std::string &cli, const fs::path &work, std::string &log) {
  // A short seeded optimization exercises the random restarts.
  std::string seeded = *preset_text("fig3");
  auto replace = [&](const std::string &from, const std::string &to) {
    seeded.replace(seeded.find(from), from.size(), to);
  };
  replace("restarts = 3", "restarts = 2");
  replace("max_evals = 400", "max_evals = 60");
  fs::create_directories(work);
  std::ofstream(work / "seeded.toml") << seeded;
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"dressed", "dressed --preset fig2"},
      {"zz-scan", "zz-scan --preset fig2 --exact"},
      {"cancel", "cancel --preset fig2"},
      {"cr-gate", "cr-gate --preset fig3"},
      {"error-budget", "error-budget --preset fig3"},
      {"cr-seeded", "cr-gate --config \"" + (work / "seeded.toml").string() + "\" --optimize --seed 7"},
      {"cz-gate", "cz-gate --preset fig4"},
      {"chain", "chain --preset appendix-a"},
  };
  bool ok = true;
  for (const auto &[name, args] : runs) {
    bool same = true;
    for (const char *rep : {"a", "b"}) {
      const fs::path out = work / name / rep;
      fs::remove_all(out);
      const int code = run_cli(cli, args + " --out \"" + out.string() + "\"", work / (name + "_" + rep + ".log"));
      if (code != 0) {
        log += fmt(" %s exit %d;", name.c_str(), code);
        same = false;
      }
    }
    if (same && !same_tree(work / name / "a", work / name / "b")) {
      log += fmt(" %s differs;", name.c_str());
      same = false;
    }
    ok = ok && same;
  }
  return ok;
}

void criterion8(const std::string &cli, const fs::path &work) {
  const ConfigDocument doc = preset("fig2");
  const DressedModel m = model_of(doc);
  SimConfig sim;
  sim.integrator = Integrator::Magnus4;
  sim.dt = 0.1;
  const DriveParams rip = rip_working_point(m, 0.1, sim);
  const DriveSet cr = cr_drives(m, cr_seed(m, 40.0, CRFlavor::ZeroControlled, rip));
  FrameSpec frame{FrameKind::Displaced, true, 5.275};
  auto pair_states = [](const ModelHamiltonian &h) {
    CMat v(h.dim(), 2);
    v.col(0) = reference_state(h, 0, 0, 0.0);
    v.col(1) = reference_state(h, 1, 1, 0.0);
    return v;
  };
  std::string failed_detail;

  const std::vector<Check> checks = {
      {"hermiticity",
       [&] {
         ModelHamiltonian h(m, cr, frame, sim);
         for (double t : {0.0, 7.7, 20.0, 33.3, 40.0})
           if (hermiticity_defect(h.at(t)) > 1e-13) return false;
         return true;
       }},
      {"norm",
       [&] {
         ModelHamiltonian h(m, cr, frame, sim);
         return propagate(h, pair_states(h), 40.0).norm_drift < 1e-8;
       }},
      {"trace",
       [&] {
         DriveSet idle;
         idle.resonator = ResonatorDrive{PulseEnvelope::constant(0.0), 0.1};
         SimConfig s = sim;
         s.dt = 0.5;
         ModelHamiltonian h(m, idle, {FrameKind::Displaced, true, std::nullopt}, s);
         NoiseSpec n;
         n.t1_left = n.t1_right = 5.0;
         n.t2_left = n.t2_right = 4.0;
         const CVec psi = (reference_state(h, 1, 0, 0.0) + reference_state(h, 0, 1, 0.0)) / std::sqrt(2.0);
         const CMat rho = lindblad_evolve(h, n, psi * psi.adjoint(), 100.0);
         return std::abs(rho.trace().real() - 1.0) < 1e-10;
       }},
      {"dt-order",
       [&] {
         auto fin = [&](double dt) {
           SimConfig s = sim;
           s.dt = dt;
           ModelHamiltonian h(m, cr, frame, s);
           return propagate(h, pair_states(h), 40.0).states;
         };
         const CMat ref = fin(0.0125);
         const double r = (fin(0.2) - ref).norm() / (fin(0.1) - ref).norm();
         return r > 12.0 && r < 20.0;
       }},
      {"ezp-quadratic",
       [&] {
         DressedModel d = m;
         d.zz_static = 0.0;
         for (double a : {0.05, 0.2, 0.3})
           if (std::abs(zz_total({2 * a, 0.1}, d) / zz_total({a, 0.1}, d) - 4.0) > 1e-12) return false;
         return true;
       }},
      {"sizzle",
       [&] {
         for (double a : {0.1, 0.27})
           if (std::abs(sizzle_crosscheck(m, {a, 0.1}) - zz_dynamic_leading({a, 0.1}, m.chi_left, m.chi_right)) >
               1e-15)
             return false;
         return true;
       }},
      {"adiabatic-endpoints",
       [&] {
         for (int n : {2, 8, 32}) {
           const auto p = PulseEnvelope::adiabatic_poly(0.27, n, 110.0);
           for (double t : {0.0, 110.0})
             if (std::abs(derivative(p, t)) > 1e-8 || std::abs(second_derivative(p, t)) > 1e-8) return false;
           // Analytic derivatives against central differences inside the support.
           const double h = 1e-4, t = 20.0;
           const double fd = (evaluate(p, t + h) - evaluate(p, t - h)) / (2 * h);
           if (std::abs(derivative(p, t) - fd) > 1e-8 + 1e-6 * std::abs(fd)) return false;
         }
         return true;
       }},
      {"drag",
       [&] {
         SimConfig s = sim;
         s.dt = 0.05;
         s.res_dim = 12;
         CRGateSpec spec;
         spec.rip_drive = rip;
         spec.duration = 16.0;
         spec.cancel_peak = 0.03;
         spec.drive_freq = m.omega_right + stark_shifts(rip, m).second;
         spec.drag = DragPlacement::None;
         const double plain = simulate_cr_gate(m, spec, s).target_second_level;
         spec.drag = DragPlacement::Cancel;
         return simulate_cr_gate(m, spec, s).target_second_level < 0.2 * plain;
       }},
      {"labeling",
       [&] {
         const FullHamiltonian h = build_full_hamiltonian(circuit_from_config(doc));
         const LabeledSpectrum ls = diagonalize_and_label(h, required_labels(3));
         std::set<int> columns;
         for (const auto &[label, k] : ls.by_label)
           if (!columns.insert(k).second || ls.levels[k].label != label || ls.levels[k].weight <= 0.5) return false;
         return true;
       }},
      {"two-qubit-chain",
       [&] {
         ChainSpec c = chain_from_model(m, {0.0, 0.1});
         for (double a : {0.1, 0.25, 0.3}) {
           c.drives[0].amplitude = a;
           if (std::abs(residual_couplings(c).two_body.at({0, 1}) - zz_total({a, 0.1}, m)) > 1e-10) return false;
         }
         return std::abs(solve_chain_cancellation(c)[0] - solve_cancellation(m, 0.1).amplitude) < 1e-10;
       }},
      {"presets-rerun",
       [&] {
         std::string log;
         const bool ok = presets_rerun_identically(cli, work, log);
         if (!ok) failed_detail += log;
         return ok;
       }},
  };
  std::string passed, failed;
  for (const auto &c : checks) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception &e) {
      failed_detail += " " + c.name + ": " + e.what() + ";";
    }
    std::string &list = ok ? passed : failed;
    list += (list.empty() ? "" : ", ") + c.name;
  }
  report(8, failed.empty(),
         "passed: " + passed + (failed.empty() ? "" : " | failed: " + failed + failed_detail));
}

}  // namespace

int main(int argc, char **argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <zzfree-cli> <scratch-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];
  const std::vector<std::pair<int, std::function<void()>>> all = {
      {1, criterion1}, {2, criteria2and3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7},    {8, [&] { criterion8(cli, work); }},
  };
  for (const auto &[id, run] : all) {
    try {
      run();
    } catch (const std::exception &e) {
      report(id, false, std::string("exception: ") + e.what());
      if (id == 2) report(3, false, "not evaluated");
    }
  }
  std::printf("acceptance: %d failing criteria\n", failures);
  return failures == 0 ? 0 : 1;
}
