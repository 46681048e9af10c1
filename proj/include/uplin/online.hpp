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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "uplin/domains.hpp"
#include "uplin/linearization.hpp"
#include "uplin/objectives.hpp"
#include "uplin/oracles.hpp"
#include "uplin/types.hpp"

namespace uplin {

/// Online gradient ascent over K* with eta_t = D / (B1 sqrt(t)).
struct OgaState {
  Vector x;
  std::size_t t = 1;
  double diameter = 0.0;
  double grad_bound = 1.0;

  double step_size() const {
    return diameter / (grad_bound * std::sqrt(static_cast<double>(t)));
  }
};

/// Starts at the lexicographically smallest vertex of K*, with D = diam(K*).
inline OgaState make_oga_state(const ConstraintSet& kstar, double grad_bound) {
  require(grad_bound > 0.0, "oga: gradient bound must be positive");
  return {first_vertex(kstar), 1, kstar.diameter(), grad_bound};
}

inline OgaState oga_step(OgaState state, std::span<const double> g,
                         const ConstraintSet& kstar) {
  require(g.size() == state.x.size() && g.size() == kstar.dim(),
          "oga_step: dimension mismatch");
  require(all_finite(g), "oga_step: non-finite gradient");
  require(state.t >= 1, "oga_step: step index must be >= 1");
  Vector moved = state.x;
  axpy(state.step_size(), g, moved);
  state.x = project(kstar, moved);
  ++state.t;
  return state;
}

struct RoundOutcome {
  Vector play;
  OgaState state;
  SurrogateEstimate estimate;
};

/// One OMBQ round with h = identity: play x_t, feed the single-query
/// surrogate estimate at x_t to OGA.
inline RoundOutcome ombq_round(const OgaState& state,
                               const LinearizationContext& ctx,
                               QueryOracle& oracle, const ConstraintSet& kstar,
                               Rng& rng) {
  RoundOutcome out;
  out.play = state.x;
  out.estimate = estimate_surrogate(ctx, oracle, state.x, rng);
  out.state = oga_step(state, out.estimate.g, kstar);
  return out;
}

/// An online instance: round t faces objectives[(t - 1) mod n].
struct OnlineProblem {
  ConstraintSet kstar = make_box(1);
  LinearizationContext ctx;
  std::vector<Objective> objectives;
  NoiseModel noise;
  std::size_t T = 1;
  std::vector<std::size_t> checkpoints;
  double alpha = 0.0;
};

/// Static comparator: `point` is the best fixed action for the full horizon
/// and prefix_best[i] = max_u sum_{t <= checkpoints[i]} f_t(u).
struct ComparatorTable {
  Vector point;
  std::vector<double> prefix_best;
};

struct RoundRecord {
  std::size_t t = 0;
  Vector x;
  Vector g;
  double value = 0.0;       // f_t(x_t), exact evaluator
  double cum_regret = 0.0;  // alpha sum f_s(u*) - sum f_s(x_s), s <= t
};

struct CheckpointRecord {
  std::size_t t = 0;
  double regret = 0.0;         // alpha-regret on [1, t]
  double linear_regret = 0.0;  // OGA regret on the surrogate estimates
  double bound = 0.0;          // (3/2) B1 D sqrt(t)
};

struct RegretTrace {
  std::vector<RoundRecord> rounds;
  std::vector<CheckpointRecord> checkpoints;
  double alpha = 0.0;
  double cumulative_payoff = 0.0;
  double grad_bound = 0.0;
  double diameter = 0.0;
  std::uint64_t queries = 0;
};

inline void validate(const OnlineProblem& p) {
  require(p.T >= 1, "online problem: T must be >= 1");
  require(!p.objectives.empty(), "online problem: no objectives");
  for (const auto& f : p.objectives)
    require(f.dim() == p.kstar.dim(), "online problem: objective dimension mismatch");
  for (std::size_t i = 0; i < p.checkpoints.size(); ++i) {
    require(p.checkpoints[i] >= 1 && p.checkpoints[i] <= p.T,
            "online problem: checkpoint outside [1, T]");
    require(i == 0 || p.checkpoints[i] > p.checkpoints[i - 1],
            "online problem: checkpoints must increase");
  }
}

inline double regret_bound(double grad_bound, double diameter, std::size_t t) {
  return 1.5 * grad_bound * diameter * std::sqrt(static_cast<double>(t));
}

/// Runs T rounds of OMBQ(OGA). Each objective gets its own first-order
/// oracle; all randomness derives from `seed`. Regret fields are NaN when no
/// comparator is supplied.
inline RegretTrace run_online(const OnlineProblem& p,
                              const std::optional<ComparatorTable>& comparator,
                              std::uint64_t seed) {
  validate(p);
  if (comparator) {
    require(comparator->point.size() == p.kstar.dim() &&
                comparator->prefix_best.size() == p.checkpoints.size(),
            "run_online: comparator does not match the problem");
  }
  std::vector<QueryOracle> oracles;
  double b1 = 0.0;
  for (std::size_t i = 0; i < p.objectives.size(); ++i) {
    oracles.emplace_back(p.objectives[i], OracleOrder::kFirst, p.noise,
                         derive_seed(seed, i + 1));
    b1 = std::max(b1, oracles.back().bound());
  }
  Rng rng(derive_seed(seed, 0));
  OgaState state = make_oga_state(p.kstar, b1);

  RegretTrace trace;
  trace.alpha = p.alpha;
  trace.grad_bound = b1;
  trace.diameter = p.kstar.diameter();
  trace.rounds.reserve(p.T);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Vector g_sum(p.kstar.dim(), 0.0);
  double g_dot_x = 0.0;
  double comparator_sum = 0.0;
  std::size_t next_cp = 0;
  for (std::size_t t = 1; t <= p.T; ++t) {
    const std::size_t idx = (t - 1) % p.objectives.size();
    const Objective& f = p.objectives[idx];
    RoundOutcome r = ombq_round(state, p.ctx, oracles[idx], p.kstar, rng);
    RoundRecord rec;
    rec.t = t;
    rec.value = f.value(r.play);
    trace.cumulative_payoff += rec.value;
    if (comparator) comparator_sum += f.value(comparator->point);
    rec.cum_regret =
        comparator ? p.alpha * comparator_sum - trace.cumulative_payoff : nan;
    axpy(1.0, r.estimate.g, g_sum);
    g_dot_x += dot(r.estimate.g, r.play);
    if (next_cp < p.checkpoints.size() && p.checkpoints[next_cp] == t) {
      CheckpointRecord cp;
      cp.t = t;
      cp.regret = comparator ? p.alpha * comparator->prefix_best[next_cp] -
                                   trace.cumulative_payoff
                             : nan;
      cp.linear_regret = dot(g_sum, linear_maximize(p.kstar, g_sum)) - g_dot_x;
      cp.bound = regret_bound(b1, trace.diameter, t);
      trace.checkpoints.push_back(cp);
      ++next_cp;
    }
    rec.x = std::move(r.play);
    rec.g = std::move(r.estimate.g);
    trace.rounds.push_back(std::move(rec));
    state = std::move(r.state);
  }
  for (const auto& o : oracles) trace.queries += o.queries();
  return trace;
}

/// Online-to-batch conversion: run T rounds against the single fixed
/// objective and return the iterate of a uniformly drawn round.
inline Vector online_to_batch(OnlineProblem p, std::size_t T,
                              std::uint64_t seed) {
  require(T >= 1, "online_to_batch: T must be >= 1");
  require(p.objectives.size() == 1,
          "online_to_batch: needs a single fixed objective");
  p.T = T;
  p.checkpoints.clear();
  const RegretTrace trace = run_online(p, std::nullopt, seed);
  Rng pick(derive_seed(seed, 0xb47c4ULL));
  const std::size_t tau =
      std::uniform_int_distribution<std::size_t>(1, T)(pick);
  return trace.rounds[tau - 1].x;
}

}  // namespace uplin
