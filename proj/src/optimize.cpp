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

#include "zzfree/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zzfree/errors.hpp"

namespace zzfree {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double> &)> &f,
                             std::vector<double> x0, const std::vector<double> &steps,
                             const NelderMeadOptions &opt) {
  const size_t n = x0.size();
  if (steps.size() != n) throw ValidationError("nelder_mead: step count mismatch");
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (size_t i = 0; i < n; ++i) pts[i + 1][i] += steps[i];
  std::vector<double> vals(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double> &x) {
    ++evals;
    double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  for (size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  auto lerp = [&](std::vector<double> &out, const std::vector<double> &worst, double t) {
    for (size_t k = 0; k < n; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  while (evals < opt.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return vals[a] < vals[b]; });
    const size_t best = order[0], worst = order[n], second = order[n - 1];

    double diam = 0.0;
    for (size_t i = 1; i <= n; ++i)
      for (size_t k = 0; k < n; ++k)
        diam = std::max(diam, std::abs(pts[order[i]][k] - pts[best][k]) / std::abs(steps[k]));
    if (vals[worst] - vals[best] <= opt.ftol * (std::abs(vals[best]) + opt.ftol) && diam < opt.xtol) break;
    if (diam < 1e-15) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t k = 0; k < n; ++k) centroid[k] += pts[order[i]][k] / n;

    lerp(xr, pts[worst], -1.0);
    double fr = eval(xr);
    if (fr < vals[best]) {
      lerp(xe, pts[worst], -2.0);
      double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      bool outside = fr < vals[worst];
      lerp(xc, outside ? xr : pts[worst], 0.5);
      double fc = eval(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (size_t i = 1; i <= n; ++i) {
          auto &p = pts[order[i]];
          for (size_t k = 0; k < n; ++k) p[k] = pts[best][k] + 0.5 * (p[k] - pts[best][k]);
          vals[order[i]] = eval(p);
        }
      }
    }
  }
  size_t best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best], evals};
}

double bracketed_root(const std::function<double(double)> &f, double lo, double hi, double ftol,
                      int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericalError("bracketed_root: no sign change on bracket");
  const double width0 = hi - lo;
  for (int it = 0; it < max_iter; ++it) {
    double mid;
    // Secant inside the bracket once it has shrunk; bisection otherwise.
    if (hi - lo < 1e-3 * width0) {
      mid = hi - fhi * (hi - lo) / (fhi - flo);
      if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    } else {
      mid = 0.5 * (lo + hi);
    }
    double fm = f(mid);
    if (std::abs(fm) < ftol) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(hi))) return std::abs(flo) < std::abs(fhi) ? lo : hi;
  }
  throw NumericalError("bracketed_root: iteration cap reached");
}

}  // namespace zzfree
