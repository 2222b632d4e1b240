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

#ifndef ZZFREE_OPTIMIZE_HPP
#define ZZFREE_OPTIMIZE_HPP

#include <functional>
#include <vector>

namespace zzfree {

struct NelderMeadOptions {
  int max_evals = 400;
  double ftol = 1e-14;  // stop when simplex value spread falls below this
  double xtol = 1e-12;  // and the simplex diameter (in step units) below this
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evals = 0;
};

// Minimizes f from x0 with an axis-aligned initial simplex of the given steps.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double> &)> &f,
                             std::vector<double> x0, const std::vector<double> &steps,
                             const NelderMeadOptions &opt = {});

// Root of f on [lo, hi] where f(lo), f(hi) differ in sign. Bisection until
// the bracket is small, then secant steps kept inside the bracket. Stops when
// |f| < ftol.
double bracketed_root(const std::function<double(double)> &f, double lo, double hi,
                      double ftol, int max_iter = 200);

}  // namespace zzfree

#endif
