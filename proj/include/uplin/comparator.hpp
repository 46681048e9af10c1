// Copyright 2026 The Authors.
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uplin/domains.hpp"
#include "uplin/objectives.hpp"
#include "uplin/online.hpp"
#include "uplin/types.hpp"

namespace uplin {

/// Best fixed action found by the numerical OPT oracle. `gap` is the
/// Frank-Wolfe gap max_y <grad f(u*), y - u*> at the returned point; zero
/// means u* is first-order stationary on K*.
struct ComparatorResult {
  Vector point;
  double value = 0.0;
  std::string method;
  std::size_t probes = 0;
  double gap = 0.0;
};

inline constexpr int kMultistartRuns = 64;
inline constexpr int kMultistartIters = 300;

namespace detail {

// Largest dyadic resolution 2^j + 1 with (2^j + 1)^d <= budget, or 0 when
// even the two-point grid does not fit. Dyadic grids are nested, which makes
// the comparator value monotone in the budget.
inline std::size_t grid_resolution(std::size_t d, std::size_t budget) {
  const double per_dim = std::pow(static_cast<double>(budget), 1.0 / d) + 1e-9;
  if (per_dim < 2.0) return 0;
  std::size_t n = 2;
  while (static_cast<double>(2 * n - 1) <= per_dim) n = 2 * n - 1;
  return n;
}

// Projected gradient ascent with backtracking on the step size.
inline Vector ascend(const ConstraintSet& kstar, const Objective& f, Vector x,
                     std::size_t& probes) {
  double fx = f.value(x);
  double step = 1.0;
  for (int it = 0; it < kMultistartIters && step > 1e-12; ++it) {
    const Vector g = f.gradient(x);
    Vector trial = x;
    axpy(step, g, trial);
    trial = project(kstar, trial);
    const double ft = f.value(trial);
    ++probes;
    if (ft > fx) {
      x = std::move(trial);
      fx = ft;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return x;
}

}  // namespace detail

/// OPT oracle over K*: the best of (a) all vertices (d <= 20), (b) a nested
/// dyadic grid of about budget points projected onto K* (d <= 10) and
/// (c) 64 multistart projected-ascent runs.
inline ComparatorResult find_comparator(const ConstraintSet& kstar,
                                        const Objective& f, std::size_t budget,
                                        std::uint64_t seed) {
  require(budget >= 1, "find_comparator: budget must be >= 1");
  require(f.dim() == kstar.dim(), "find_comparator: dimension mismatch");
  const std::size_t d = kstar.dim();
  ComparatorResult best;
  best.value = -std::numeric_limits<double>::infinity();
  auto offer = [&](const Vector& x, const char* method) {
    const double v = f.value(x);
    ++best.probes;
    if (v > best.value) {
      best.value = v;
      best.point = x;
      best.method = method;
    }
  };

  if (d <= 20) for_each_vertex(kstar, [&](const Vector& v) { offer(v, "vertex-enum"); });

  if (d <= 10) {
    const std::size_t n = detail::grid_resolution(d, budget);
    if (n >= 2) {
      std::vector<std::size_t> idx(d, 0);
      Vector x(d);
      while (true) {
        for (std::size_t i = 0; i < d; ++i)
          x[i] = static_cast<double>(idx[i]) / static_cast<double>(n - 1);
        offer(project(kstar, x), "grid");
        std::size_t i = 0;
        while (i < d && ++idx[i] == n) idx[i++] = 0;
        if (i == d) break;
      }
    }
  }

  Rng rng(seed);
  for (int run = 0; run < kMultistartRuns; ++run) {
    Vector start = run == 0 ? first_vertex(kstar) : sample_point(kstar, rng);
    offer(detail::ascend(kstar, f, std::move(start), best.probes),
          "multistart-ascent");
  }

  const Vector g = f.gradient(best.point);
  best.gap = std::max(0.0, dot(g, sub(linear_maximize(kstar, g), best.point)));
  return best;
}

/// Comparator values for every checkpoint prefix of the round-robin
/// sequence. The full-horizon optimum supplies the per-round comparator.
inline ComparatorTable build_comparator_table(const OnlineProblem& p,
                                              std::size_t budget,
                                              std::uint64_t seed) {
  validate(p);
  const std::size_t n = p.objectives.size();
  auto prefix_objective = [&](std::size_t t) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      w[i] = static_cast<double>(t / n + (i < t % n ? 1 : 0));
    return make_weighted_sum(p.objectives, std::move(w));
  };
  ComparatorTable table;
  if (n == 1) {
    const ComparatorResult r = find_comparator(p.kstar, p.objectives[0], budget, seed);
    table.point = r.point;
    for (std::size_t t : p.checkpoints)
      table.prefix_best.push_back(static_cast<double>(t) * r.value);
    return table;
  }
  table.point = find_comparator(p.kstar, prefix_objective(p.T), budget, seed).point;
  for (std::size_t t : p.checkpoints)
    table.prefix_best.push_back(
        find_comparator(p.kstar, prefix_objective(t), budget, seed).value);
  return table;
}

}  // namespace uplin
