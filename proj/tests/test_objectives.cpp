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

#include <gtest/gtest.h>

#include "uplin/class_checks.hpp"
#include "uplin/objectives.hpp"

namespace uplin {
namespace {

Objective example_quadratic() {
  return make_monotone_quadratic({2, 2}, {{1, 1}, {1, 1}});
}

std::vector<Objective> builtins() {
  return {make_linear({1.0, 0.5, 2.0}), example_quadratic(),
          make_random_monotone_quadratic(6, 3), make_norm_power(5, 2.0),
          make_norm_power(4, 1.5), make_norm_power(3, 3.0),
          make_weighted_sum({make_linear({1, 1}), example_quadratic()}, {0.5, 2.0})};
}

TEST(Objectives, HandValues) {
  const auto q = example_quadratic();
  EXPECT_EQ(q.value(Vector{1, 1}), 2.0);
  EXPECT_EQ(q.value(Vector{0, 0}), 0.0);
  EXPECT_EQ(q.gradient(Vector{1, 1}), Vector({0, 0}));
  EXPECT_EQ(q.gradient(Vector{0, 0}), Vector({2, 2}));
  const auto np = make_norm_power(2, 2.0);
  EXPECT_DOUBLE_EQ(np.value(Vector{0.5, 0.5}), 1.0);
  EXPECT_EQ(np.gradient(Vector{0.5, 0.5}), Vector({2, 2}));
  const auto lin = make_monotone_quadratic({1, 1, 1}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(lin.gradient(Vector{0.3, 0.9, 0.1}), Vector({1, 1, 1}));
}

TEST(Objectives, DeclaredGradientBoundIsSupremum) {
  const auto np = make_norm_power(4, 2.0);
  EXPECT_DOUBLE_EQ(np.gradient_bound(), norm2(np.gradient(Vector(4, 1.0))));
  Rng rng(1);
  for (const auto& f : builtins())
    for (int i = 0; i < 1000; ++i)
      EXPECT_LE(norm2(f.gradient(uniform_vector(f.dim(), rng))), f.gradient_bound() * (1 + 1e-12));
}

TEST(Objectives, GradientMatchesFiniteDifferences) {
  for (const auto& f : builtins()) EXPECT_LE(gradient_error(f, 100, 7), 1e-5) << f.name();
}

TEST(Objectives, Monotone) {
  for (const auto& f : builtins()) EXPECT_GE(min_gradient(f, 1000, 8), -1e-9) << f.name();
}

TEST(Objectives, QuadraticIsDrSubmodular) {
  const auto f = make_random_monotone_quadratic(5, 4);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = detail::ordered_pair(5, rng);
    const auto gx = f.gradient(x), gy = f.gradient(y);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_LE(gy[k], gx[k] + 1e-12);
  }
}

TEST(Objectives, RejectsNonMonotoneQuadratic) {
  EXPECT_THROW(make_monotone_quadratic({0.5, 0.5}, {{1, 1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(make_monotone_quadratic({2, 2}, {{1, 0}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(make_linear({1.0, -0.1}), std::invalid_argument);
}

TEST(Objectives, JsonFactories) {
  const auto f = objective_from_json({{"type", "quadratic"}, {"a", {2, 2}}, {"H", {{1, 1}, {1, 1}}}});
  EXPECT_EQ(f.value(Vector{1, 1}), 2.0);
  EXPECT_EQ(objective_from_json({{"type", "norm_power"}, {"d", 3}, {"m", 2}}).value(Vector{1, 1, 1}), 9.0);
  EXPECT_THROW(objective_from_json({{"type", "cubic"}}), std::exception);
}

TEST(UpConcave, LinearHasNoViolation) {
  for (const auto& theta : {ThetaSpec::constant_one(), ThetaSpec::p_norm_power(1.0, 1.0),
                            ThetaSpec::p_norm_power(2.0, 0.5)}) {
    const auto rep = check_up_concave(make_linear({1, 2, 3}), 1.0, theta, 10000, 1);
    EXPECT_LE(rep.max_violation(), 1e-12);
    EXPECT_EQ(rep.tested, 10000u);
  }
}

TEST(UpConcave, DrQuadraticMatchesGridBruteForce) {
  const auto f = example_quadratic();
  const auto rep = check_up_concave(f, 1.0, ThetaSpec::constant_one(), 10000, 2);
  EXPECT_LE(rep.max_violation(), 1e-9);
  // Independent oracle: every ordered grid pair.
  double worst = 0.0;
  const int n = 20;
  for (int a = 1; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      for (int c = a; c <= n; ++c)
        for (int e = b; e <= n; ++e) {
          const Vector x{a / double(n), b / double(n)}, y{c / double(n), e / double(n)};
          const double gap = f.value(y) - f.value(x);
          worst = std::max({worst, dot(f.gradient(y), sub(y, x)) - gap,
                            gap - dot(f.gradient(x), sub(y, x))});
        }
  EXPECT_LE(worst, 1e-12);
}

TEST(UpConcave, SquaredSumOnRayAnalysis) {
  // f = (sum x)^2, theta = |x|_1^sigma, t = |y|_1 / |x|_1 >= 1: the lower side
  // reduces to 2 <= 1 + t and the upper side to 1 + t <= 2 t^sigma.
  const auto f = make_norm_power(2, 2.0);
  const auto rep = check_up_concave(f, 1.0, ThetaSpec::p_norm_power(1.0, 1.0), 10000, 3);
  EXPECT_LE(rep.max_violation(), 1e-9);
  // Below sigma = 1/2 the upper inequality fails near t = 1.
  EXPECT_GT(check_up_concave(f, 1.0, ThetaSpec::p_norm_power(1.0, 0.4), 10000, 3).upper_violation, 0.0);
}

TEST(UpConcave, WitnessIsOrdered) {
  const auto rep = check_up_concave(make_norm_power(3, 3.0), 1.0, ThetaSpec::constant_one(), 1000, 4);
  ASSERT_GT(rep.max_violation(), 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(rep.witness_x[i], rep.witness_y[i]);
  EXPECT_GE(sup_norm(rep.witness_x), 1e-3);
}

TEST(Oss, HandCases) {
  EXPECT_LE(check_oss(make_linear({1, 2}), 0.0, 1000, 5).max_violation(), 1e-9);
  EXPECT_LE(check_oss(make_random_monotone_quadratic(4, 2), 0.0, 1000, 5).max_violation(), 1e-6);
  // (1/2) u'Hu = |u|_1^2 against 2 |u|_1^2 on the right: slack at sigma = 1.
  const auto f = make_norm_power(3, 2.0);
  EXPECT_LE(check_oss(f, 1.0, 1000, 5).max_violation(), 1e-6);
  EXPECT_NEAR(hessian_quadratic_form(f, Vector{0.2, 0.3, 0.4}, Vector{1, 0.5, 0}), 4.5, 1e-6);
}

TEST(Containment, CertifiedClassesNest) {
  for (const auto& f : {make_norm_power(4, 2.0), make_random_monotone_quadratic(4, 9)}) {
    const auto up = certify_p_sigma(f, 1.0, 1.0, 10000, 11);
    EXPECT_LE(check_oss(up, up.tag().sigma, 10000, 12).max_violation(), 1e-4);
    const auto oss = certify_oss(f, 10000, 13);
    EXPECT_LE(check_up_concave(oss, 1.0, ThetaSpec::p_norm_power(1.0, 2.0 * oss.tag().sigma),
                               10000, 14).max_violation(), 1e-6);
    EXPECT_LE(check_ray_lyapunov(oss, oss.tag().sigma, 100, 50, 15), 1e-6);
  }
}

TEST(Containment, SigmaZeroChecksCoincide) {
  const auto f = make_random_monotone_quadratic(3, 6);
  const auto rep = check_containment(f, 0.0, 5000, 16);
  EXPECT_LE(rep.up_sigma.max_violation(), 1e-9);
  EXPECT_LE(rep.oss.max_violation(), 1e-6);
  EXPECT_LE(rep.up_two_sigma.max_violation(), 1e-9);
}

TEST(Certification, TagsAndMonotonicityRetest) {
  const auto f = certify_p_sigma(make_norm_power(3, 2.0), 1.0, 1.0, 10000, 17);
  EXPECT_EQ(f.tag().kind, ClassTag::Kind::kPSigma);
  EXPECT_GT(f.tag().sigma, 0.5);
  EXPECT_LE(f.tag().sigma, 1.0);
  Rng rng(18);
  for (int i = 0; i < 1000; ++i) {
    const auto [x, y] = detail::ordered_pair(3, rng);
    EXPECT_GE(f.value(y), f.value(x));
  }
  EXPECT_EQ(certify_p_sigma(make_linear({1, 1}), 1.0, 1.0, 1000, 19).tag().sigma, 0.0);
}

}  // namespace
}  // namespace uplin
