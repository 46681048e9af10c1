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


#include <cmath>
#include <future>

#include <gtest/gtest.h>

#include "uplin/comparator.hpp"
#include "uplin/online.hpp"

namespace uplin {
namespace {

OnlineProblem linear_problem(const ConstraintSet& k, Vector a, ThetaSpec theta, std::size_t T) {
  OnlineProblem p;
  p.kstar = maximal_convex_subset(k);
  p.ctx = make_context(1.0, std::move(theta), k);
  p.objectives = {make_linear(std::move(a))};
  p.T = T;
  p.alpha = alpha_star(p.ctx, p.kstar);
  return p;
}

TEST(Oga, HandStep) {
  const auto k = make_uniform_matroid(2, 1, true);
  OgaState s{{0.5, 0.5}, 1, 0.2, 1.0};
  EXPECT_DOUBLE_EQ(s.step_size(), 0.2);
  const auto next = oga_step(s, Vector{1, 0}, k);
  EXPECT_NEAR(next.x[0], 0.6, 1e-15);
  EXPECT_NEAR(next.x[1], 0.4, 1e-15);
  EXPECT_EQ(next.t, 2u);
  EXPECT_DOUBLE_EQ(next.step_size(), 0.2 / std::sqrt(2.0));
}

TEST(Oga, ZeroGradientAndSingleton) {
  const auto k = make_uniform_matroid(3, 2, true);
  OgaState s{{0.5, 0.5, 1.0}, 3, 1.0, 1.0};
  EXPECT_EQ(oga_step(s, Vector(3, 0.0), k).x, s.x);
  const auto single = make_singleton({1, 1, 1});
  EXPECT_EQ(oga_step(make_oga_state(single, 2.0), Vector{5, -3, 1}, single).x, Vector({1, 1, 1}));
}

TEST(Oga, StartsAtFirstVertex) {
  const auto k = make_uniform_matroid(4, 2, true);
  const auto s = make_oga_state(k, 3.0);
  EXPECT_EQ(s.x, Vector({0, 0, 1, 1}));
  EXPECT_DOUBLE_EQ(s.diameter, 2.0);
  EXPECT_THROW(oga_step(s, Vector{1, NAN, 0, 0}, k), std::invalid_argument);
}

TEST(Ombq, FirstPlayIsInitialPoint) {
  const auto p = linear_problem(make_uniform_matroid(3, 2, false), {1, 2, 3}, ThetaSpec::constant_one(), 1);
  QueryOracle o(p.objectives[0], OracleOrder::kFirst, NoiseModel::none(), 0);
  Rng rng(1);
  const auto state = make_oga_state(p.kstar, o.bound());
  EXPECT_EQ(ombq_round(state, p.ctx, o, p.kstar, rng).play, state.x);
}

TEST(Ombq, ZeroNoiseLinearFollowsDeterministicAscent) {
  // theta = |x|_2 varies over K*, so the weight changes along the path.
  const Vector a{1.0, 0.2, 0.6, 0.9};
  const auto p = linear_problem(make_uniform_matroid(4, 2, false), a, ThetaSpec::p_norm_power(2.0, 1.0), 5);
  const auto trace = run_online(p, std::nullopt, 11);
  const double b = norm2(a) * (1 + 1e-12);
  Vector x = first_vertex(p.kstar);
  for (std::size_t t = 1; t <= 5; ++t) {
    EXPECT_LE(sup_norm(sub(trace.rounds[t - 1].x, x)), 1e-9) << "round " << t;
    Vector moved = x;
    axpy(p.kstar.diameter() / (b * std::sqrt(static_cast<double>(t))) * weight_integral(p.ctx, x), a, moved);
    x = project(p.kstar, moved);
  }
}

TEST(RunOnline, SingleRoundRegret) {
  const auto p = linear_problem(make_uniform_matroid(3, 2, false), {1, 2, 3}, ThetaSpec::constant_one(), 1);
  auto q = p;
  q.checkpoints = {1};
  const ComparatorTable table{{0, 1, 1}, {5.0}};
  const auto trace = run_online(q, table, 2);
  EXPECT_DOUBLE_EQ(trace.checkpoints[0].regret, q.alpha * 5.0 - q.objectives[0].value(first_vertex(q.kstar)));
  EXPECT_DOUBLE_EQ(trace.rounds[0].cum_regret, trace.checkpoints[0].regret);
}

TEST(RunOnline, LinearRegretWithinBound) {
  auto p = linear_problem(make_uniform_matroid(3, 2, false), {3, 1, 2}, ThetaSpec::constant_one(), 100);
  p.checkpoints = {10, 50, 100};
  const auto table = build_comparator_table(p, 1000, 1);
  EXPECT_DOUBLE_EQ(table.prefix_best.back(), 500.0);
  const auto trace = run_online(p, table, 3);
  for (const auto& cp : trace.checkpoints) {
    EXPECT_LE(cp.regret, cp.bound);
    EXPECT_LE(cp.linear_regret, cp.bound);
    EXPECT_DOUBLE_EQ(cp.bound, 1.5 * trace.grad_bound * trace.diameter * std::sqrt(double(cp.t)));
  }
  EXPECT_EQ(trace.queries, 100u);
}

TEST(RunOnline, AdversarialSequenceStaysFeasibleAndBounded) {
  OnlineProblem p;
  const auto k = make_uniform_matroid(5, 2, false);
  p.kstar = maximal_convex_subset(k);
  p.ctx = make_context(1.0, ThetaSpec::constant_one(), k);
  p.objectives = {make_linear({1, 0, 0, 0, 1}), make_linear({0, 1, 1, 0, 0}),
                  make_random_monotone_quadratic(5, 4)};
  p.noise = NoiseModel::sphere(0.3);
  p.T = 1000;
  p.checkpoints = {100, 1000};
  p.alpha = alpha_star(p.ctx, p.kstar);
  const auto table = build_comparator_table(p, 2000, 5);
  const auto trace = run_online(p, table, 6);
  for (const auto& r : trace.rounds) EXPECT_TRUE(p.kstar.contains(r.x));
  for (const auto& cp : trace.checkpoints) EXPECT_LE(cp.regret, cp.bound);
  EXPECT_EQ(trace.queries, p.T);
}

TEST(RunOnline, DeterministicAcrossThreads) {
  auto p = linear_problem(make_uniform_matroid(4, 2, false), {1, 1, 2, 3}, ThetaSpec::constant_one(), 200);
  p.objectives = {make_random_monotone_quadratic(4, 8)};
  p.noise = NoiseModel::uniform_ball(0.5);
  const auto serial = run_online(p, std::nullopt, 9);
  auto fut = std::async(std::launch::async, [&] { return run_online(p, std::nullopt, 9); });
  auto other = std::async(std::launch::async, [&] { return run_online(p, std::nullopt, 10); });
  const auto threaded = fut.get();
  ASSERT_EQ(serial.rounds.size(), threaded.rounds.size());
  for (std::size_t i = 0; i < serial.rounds.size(); ++i) {
    EXPECT_EQ(serial.rounds[i].x, threaded.rounds[i].x);
    EXPECT_EQ(serial.rounds[i].g, threaded.rounds[i].g);
  }
  EXPECT_NE(other.get().rounds.back().g, serial.rounds.back().g);
}

TEST(RunOnline, RejectsMismatchedInput) {
  auto p = linear_problem(make_uniform_matroid(3, 1, false), {1, 1, 1}, ThetaSpec::constant_one(), 5);
  p.objectives.push_back(make_linear({1, 1}));
  EXPECT_THROW(run_online(p, std::nullopt, 0), std::invalid_argument);
  auto q = linear_problem(make_uniform_matroid(3, 1, false), {1, 1, 1}, ThetaSpec::constant_one(), 5);
  q.checkpoints = {5};
  EXPECT_THROW(run_online(q, ComparatorTable{{1, 0, 0}, {}}, 0), std::invalid_argument);
}

TEST(OnlineToBatch, SingleRoundReturnsStart) {
  const auto p = linear_problem(make_uniform_matroid(3, 2, false), {1, 2, 3}, ThetaSpec::constant_one(), 1);
  EXPECT_EQ(online_to_batch(p, 1, 4), first_vertex(p.kstar));
}

TEST(OnlineToBatch, LinearReachesAscentFixedPoint) {
  // The w-weighted ascent on a constant gradient settles on the top-k vertex.
  const auto p = linear_problem(make_uniform_matroid(5, 2, false), {0.1, 0.9, 0.3, 0.7, 0.2},
                                ThetaSpec::constant_one(), 1);
  const double target = 0.9 + 0.7;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto x = online_to_batch(p, 10000, seed);
    EXPECT_TRUE(p.kstar.contains(x));
    EXPECT_NEAR(p.objectives[0].value(x), target, 1e-3);
  }
  auto seq = p;
  seq.objectives.push_back(make_linear({1, 1, 1, 1, 1}));
  EXPECT_THROW(online_to_batch(seq, 10, 0), std::invalid_argument);
}

TEST(Comparator, LinearOptimumIsVertex) {
  const auto kstar = make_uniform_matroid(6, 3, true);
  const auto r = find_comparator(kstar, make_linear({5, 1, 4, 2, 6, 3}), 100, 0);
  // Ascent may tie the vertex up to rounding; the strict maximum keeps it.
  EXPECT_NEAR(r.value, 15.0, 1e-12);
  EXPECT_LE(sup_norm(sub(r.point, Vector{1, 0, 1, 0, 1, 0})), 1e-12);
  EXPECT_NEAR(r.gap, 0.0, 1e-12);
}

TEST(Comparator, QuadraticGridAndAscentAgree) {
  const auto kstar = make_uniform_matroid(2, 1, true);
  const auto f = make_monotone_quadratic({2.0, 1.5}, {{1.0, 0.5}, {0.5, 0.8}});
  // Dense line search on x = (s, 1 - s) as the independent reference.
  double best = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double s = i / 1e6;
    best = std::max(best, f.value(Vector{s, 1.0 - s}));
  }
  const auto r = find_comparator(kstar, f, 1 << 16, 7);
  EXPECT_NEAR(r.value, best, 1e-4);
  EXPECT_GE(r.value, best - 1e-12);
  EXPECT_LE(r.gap, 1e-6);
}

TEST(Comparator, ConstantObjective) {
  const auto kstar = make_uniform_matroid(3, 1, true);
  const Objective c(3, [](std::span<const double>) { return 2.5; },
                    [](std::span<const double>) { return Vector(3, 0.0); }, {}, 0.0, "constant");
  const auto r = find_comparator(kstar, c, 50, 0);
  EXPECT_EQ(r.value, 2.5);
  EXPECT_TRUE(kstar.contains(r.point));
}

TEST(Comparator, MonotoneInBudget) {
  const auto kstar = make_uniform_matroid(4, 2, true);
  const auto f = make_random_monotone_quadratic(4, 17, 2.0);
  double prev = -1e300;
  for (std::size_t budget = 1; budget <= 1 << 14; budget *= 2) {
    const auto r = find_comparator(kstar, f, budget, 3);
    EXPECT_GE(r.value, prev);
    EXPECT_TRUE(kstar.contains(r.point));
    prev = r.value;
  }
  EXPECT_EQ(detail::grid_resolution(2, 9), 3u);
  EXPECT_EQ(detail::grid_resolution(2, 24), 3u);
  EXPECT_EQ(detail::grid_resolution(2, 25), 5u);
  EXPECT_EQ(detail::grid_resolution(3, 7), 0u);
}

}  // namespace
}  // namespace uplin
