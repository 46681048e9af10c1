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


#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "uplin/linearization.hpp"

namespace uplin {
namespace {

const double kE1 = std::exp(-1.0);

// Trapezoid rule on N equal panels, used as an independent reference.
Vector trapezoid_surrogate(const LinearizationContext& ctx, const Objective& f,
                           const Vector& x, int n) {
  Vector acc(x.size(), 0.0);
  for (int i = 0; i <= n; ++i) {
    const double r = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    axpy(w / n * std::exp(ell(ctx, r, x)), f.gradient(scaled(x, r)), acc);
  }
  return acc;
}

LinearizationContext unit_context(std::size_t d) {
  return make_context(1.0, ThetaSpec::constant_one(), make_box(d));
}

TEST(Ell, ClosedForms) {
  const auto ctx = unit_context(3);
  const Vector x{0.2, 0.5, 0.9};
  for (double r : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(ell(ctx, r, x), -(1.0 - r), 1e-15);
  EXPECT_EQ(ell(ctx, 1.0, x), 0.0);
  const auto pctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 2.0), make_box(3));
  for (double r : {0.0, 0.3, 0.9}) EXPECT_EQ(ell(pctx, r, Vector(3, 0.0)), 0.0);
  // sigma = 1 over the box: l(r, x) = -(|x|_1 / 3)(1 - r^2) / 2.
  const auto lctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(3));
  EXPECT_NEAR(ell(lctx, 0.5, x), -(1.6 / 3.0) * 0.75 / 2.0, 1e-15);
}

TEST(Ell, CustomThetaMatchesClosedForm) {
  const auto box = make_box(3);
  const auto closed = make_context(0.7, ThetaSpec::p_norm_power(2.0, 1.5), box);
  const auto custom = make_context(
      0.7, ThetaSpec::custom([](std::span<const double> v) { return std::pow(pnorm(v, 2.0), 1.5); }),
      box, 257);
  EXPECT_NEAR(closed.R_theta, custom.R_theta, 1e-12);
  const Vector x{0.3, 0.8, 0.1};
  for (double r : {0.0, 0.4, 0.8}) EXPECT_NEAR(ell(closed, r, x), ell(custom, r, x), 1e-9);
}

TEST(Weight, KnownValues) {
  const Vector x{0.3, 0.6};
  EXPECT_NEAR(weight_integral(unit_context(2), x), 1.0 - kE1, 1e-12);
  auto tiny = make_context(1e-12, ThetaSpec::constant_one(), make_box(2));
  EXPECT_NEAR(weight_integral(tiny, x), 1.0, 1e-12);
  const auto pctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(2));
  EXPECT_EQ(weight_integral(pctx, Vector(2, 0.0)), 1.0);
}

TEST(Surrogate, LinearIsWeightedCoefficient) {
  const Vector a{1.0, 2.0, 0.5};
  const auto f = make_linear(a);
  const auto ctx = make_context(0.8, ThetaSpec::p_norm_power(1.0, 1.0), make_box(3));
  const Vector x{0.4, 0.1, 0.7};
  const auto g = surrogate_exact(ctx, f, x);
  const double w = weight_integral(ctx, x);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], w * a[i], 1e-9);
}

TEST(Surrogate, QuadraticMatchesDenseTrapezoid) {
  const auto f = make_random_monotone_quadratic(4, 21);
  const auto ctx = unit_context(4);
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const auto x = uniform_vector(4, rng);
    EXPECT_LE(sup_norm(sub(surrogate_exact(ctx, f, x), trapezoid_surrogate(ctx, f, x, 100000))), 1e-8);
  }
}

TEST(Surrogate, RootSingularityConverges) {
  // grad f(r x) ~ sqrt(r): trapezoid converges like N^-1.5.
  const auto f = make_norm_power(3, 1.5);
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 0.5), make_box(3));
  const Vector x{0.9, 0.2, 0.6};
  EXPECT_LE(sup_norm(sub(surrogate_exact(ctx, f, x), trapezoid_surrogate(ctx, f, x, 100000))), 1e-6);
}

TEST(Surrogate, AtOriginIsGradientThere) {
  const auto f = make_random_monotone_quadratic(3, 2);
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(3));
  const Vector zero(3, 0.0);
  const auto g = surrogate_exact(ctx, f, zero);
  const auto g0 = f.gradient(zero);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], g0[i], 1e-12);
}

TEST(Surrogate, DoublingNodesChangesLittle) {
  const auto f = make_norm_power(5, 2.0);
  auto coarse = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_uniform_matroid(5, 2, false));
  auto fine = coarse;
  fine.nodes = 2 * coarse.nodes - 1;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto x = uniform_vector(5, rng);
    EXPECT_LE(sup_norm(sub(surrogate_exact(coarse, f, x), surrogate_exact(fine, f, x))), 1e-8);
  }
}

TEST(Alpha, PointwiseValues) {
  Rng rng(4);
  const auto ctx = unit_context(3);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(alpha_at(ctx, uniform_vector(3, rng)), 1.0 - kE1, 1e-15);
  const auto pctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(4));
  EXPECT_EQ(alpha_at(pctx, Vector(4, 0.0)), 0.0);
  EXPECT_NEAR(alpha_at(pctx, Vector(4, 1.0)), 1.0 - std::exp(-0.5), 1e-15);
  EXPECT_NEAR(alpha_at(pctx, Vector{1, 1, 0.5, 0.5}), 1.0 - std::exp(-3.0 / 8.0), 1e-15);
}

TEST(Alpha, GlobalCoefficients) {
  const auto k = make_uniform_matroid(7, 3, false);
  const auto kstar = maximal_convex_subset(k);
  for (double sigma : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, sigma), k);
    EXPECT_NEAR(alpha_star(ctx, kstar), 1.0 - std::exp(-1.0 / (sigma + 1.0)), 1e-12);
  }
  EXPECT_NEAR(alpha_star(make_context(1.0, ThetaSpec::p_norm_power(1.0, 2.0), k), kstar),
              0.28347, 1e-5);
  const auto weak = make_context(0.5, ThetaSpec::constant_one(), k);
  EXPECT_NEAR(alpha_star(weak, kstar), 1.0 - std::exp(-0.5), 1e-15);
}

TEST(Alpha, CustomThetaUsesVertices) {
  const auto k = make_partition_matroid({{0, 1, 2}, {3, 4}}, {1, 1}, false);
  const auto kstar = maximal_convex_subset(k);
  const auto custom = make_context(
      1.0, ThetaSpec::custom([](std::span<const double> v) { return norm1(v); }), k, 129);
  const auto closed = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), k);
  EXPECT_NEAR(alpha_star(custom, kstar), alpha_star(closed, kstar), 1e-12);
}

TEST(ZDistribution, CdfIsValid) {
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 2.0), make_box(4));
  const ZDistribution z(ctx, Vector{0.9, 0.8, 0.7, 1.0});
  EXPECT_EQ(z.cdf(0.0), 0.0);
  EXPECT_NEAR(z.cdf(1.0 - 1e-15), 1.0, 1e-12);
  double prev = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double c = z.cdf(i / 10000.0);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_EQ(z.quantile(0.0), 0.0);
  EXPECT_EQ(z.quantile(1.0), 1.0);
  for (double u : {0.1, 0.5, 0.9}) EXPECT_NEAR(z.cdf(z.quantile(u)), u, 1e-9);
  EXPECT_NEAR(z.weight(), weight_integral(ctx, Vector{0.9, 0.8, 0.7, 1.0}), 1e-10);
}

TEST(ZDistribution, SigmaZeroClosedForm) {
  const ZDistribution z(unit_context(2), Vector{0.5, 0.5});
  for (double t : {0.1, 0.4, 0.8})
    EXPECT_NEAR(z.cdf(t), (std::exp(t - 1.0) - kE1) / (1.0 - kE1), 1e-10);
  EXPECT_NEAR(z.quantile(0.5), 1.0 + std::log((1.0 + kE1) / 2.0), 1e-9);
  EXPECT_NEAR(z.quantile(0.5), 0.6201, 1e-4);
}

TEST(ZDistribution, FlatExponentGivesUniform) {
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(3));
  const ZDistribution z(ctx, Vector(3, 0.0));
  Rng rng(5);
  std::vector<double> s(100000);
  for (double& v : s) v = z.sample(rng);
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    ks = std::max({ks, (i + 1.0) / s.size() - s[i], s[i] - static_cast<double>(i) / s.size()});
  EXPECT_LT(ks, 0.01);
}

TEST(Estimator, LinearEstimateIsExact) {
  const Vector a{0.5, 1.5, 1.0};
  QueryOracle o(make_linear(a), OracleOrder::kFirst, NoiseModel::none(), 1);
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(3));
  const Vector x{0.2, 0.9, 0.4};
  const double w = ZDistribution(ctx, x).weight();
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const auto e = estimate_surrogate(ctx, o, x, rng);
    EXPECT_EQ(e.g, scaled(a, w));
    EXPECT_EQ(e.queries, 1);
  }
  EXPECT_EQ(o.queries(), 100u);
}

TEST(Estimator, UnbiasedAndBounded) {
  const auto f = make_random_monotone_quadratic(3, 8);
  const auto ctx = make_context(1.0, ThetaSpec::constant_one(), make_box(3));
  const Vector x{0.6, 0.3, 0.8};
  const auto exact = surrogate_exact(ctx, f, x);
  for (const auto noise : {NoiseModel::none(), NoiseModel::sphere(0.5)}) {
    QueryOracle o(f, OracleOrder::kFirst, noise, 7);
    Rng rng(8);
    constexpr int n = 200000;
    Vector mean(3, 0.0), sq(3, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto e = estimate_surrogate(ctx, o, x, rng);
      EXPECT_LE(norm2(e.g), o.bound());
      for (int k = 0; k < 3; ++k) mean[k] += e.g[k] / n, sq[k] += e.g[k] * e.g[k] / n;
    }
    for (int k = 0; k < 3; ++k)
      EXPECT_LE(std::abs(mean[k] - exact[k]), 3 * std::sqrt((sq[k] - mean[k] * mean[k]) / (n - 1)));
  }
}

TEST(Estimator, RejectsZerothOrderOracle) {
  QueryOracle o(make_linear({1, 1}), OracleOrder::kZeroth, NoiseModel::none(), 0);
  Rng rng(0);
  EXPECT_THROW(estimate_surrogate(unit_context(2), o, Vector{0.5, 0.5}, rng), std::invalid_argument);
}

TEST(LinearizationInequality, ExactClassOverWholeBox) {
  // (sum x)^2 lies in the (1,1,1) class, so the pointwise coefficient holds for
  // every pair of the ambient box, not only on K*.
  const auto f = make_norm_power(4, 2.0);
  const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), make_box(4));
  Rng rng(9);
  double worst = -1e300;
  for (int i = 0; i < 2000; ++i) {
    const auto x = uniform_vector(4, rng);
    auto y = uniform_vector(4, rng);
    if (i % 2) for (double& v : y) v = 1.0 - 0.1 * v;
    worst = std::max(worst, alpha_at(ctx, x) * f.value(y) - f.value(x) -
                                dot(surrogate_exact(ctx, f, x), sub(y, x)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(LinearizationInequality, DrQuadraticOnBasisPolytope) {
  const auto f = make_random_monotone_quadratic(6, 13);
  const auto k = make_uniform_matroid(6, 2, false);
  const auto kstar = maximal_convex_subset(k);
  const auto ctx = make_context(1.0, ThetaSpec::constant_one(), k);
  const double alpha = alpha_star(ctx, kstar);
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const auto x = sample_point(kstar, rng), y = sample_point(kstar, rng);
    EXPECT_GE(dot(surrogate_exact(ctx, f, x), sub(y, x)), alpha * f.value(y) - f.value(x) - 1e-6);
  }
}

}  // namespace
}  // namespace uplin
