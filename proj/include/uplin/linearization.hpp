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
#include <limits>
#include <span>
#include <vector>

#include "uplin/domains.hpp"
#include "uplin/objectives.hpp"
#include "uplin/oracles.hpp"
#include "uplin/theta.hpp"
#include "uplin/types.hpp"

namespace uplin {

/// Parameters of the upper linearization of a gamma-weakly theta-up-concave
/// class over a region K that contains the origin.
struct LinearizationContext {
  double gamma = 1.0;
  ThetaSpec theta = ThetaSpec::constant_one();
  double R_theta = 1.0;  // max of theta over the ambient K
  int nodes = 65;        // composite Simpson node count, odd and >= 3
  double cdf_tol = 1e-10;
};

inline LinearizationContext make_context(double gamma, ThetaSpec theta,
                                         const ConstraintSet& ambient,
                                         int nodes = 65) {
  require(gamma > 0.0 && gamma <= 1.0, "linearization: gamma must lie in (0,1]");
  require(nodes >= 3 && nodes % 2 == 1, "linearization: nodes must be odd and >= 3");
  const double R = radial_bounds(ambient, theta).R_theta;
  require(R > 0.0, "linearization: R_theta must be positive");
  return {gamma, std::move(theta), R, nodes, 1e-10};
}

/// Composite Simpson rule with n (odd) nodes on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / (n - 1);
  double s = f(a) + f(b);
  for (int i = 1; i < n - 1; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// int_r^1 theta(s x) ds. Closed form for the homogeneous kinds.
inline double theta_ray_integral(const LinearizationContext& ctx, double r,
                                 std::span<const double> x) {
  if (ctx.theta.is_power()) {
    const double q = ctx.theta.sigma() + 1.0;
    return ctx.theta(x) * (1.0 - std::pow(r, q)) / q;
  }
  if (r >= 1.0) return 0.0;
  // s = u^2 removes the s^a endpoint behaviour of homogeneous-like theta.
  Vector sx(x.size());
  return simpson(
      [&](double u) {
        for (std::size_t i = 0; i < x.size(); ++i) sx[i] = u * u * x[i];
        return 2.0 * u * ctx.theta(sx);
      },
      std::sqrt(std::max(r, 0.0)), 1.0, ctx.nodes);
}

/// l(r, x) = -(gamma / R_theta) int_r^1 theta(s x) ds; always <= 0 and
/// l(1, x) = 0.
inline double ell(const LinearizationContext& ctx, double r,
                  std::span<const double> x) {
  return -ctx.gamma / ctx.R_theta * theta_ray_integral(ctx, r, x);
}

/// w(x) = int_0^1 exp(l(r, x)) dr by composite Simpson, doubling the node
/// count until successive estimates agree to 1e-14.
inline double weight_integral(const LinearizationContext& ctx,
                              std::span<const double> x) {
  auto integrand = [&](double r) { return std::exp(ell(ctx, r, x)); };
  int n = ctx.nodes;
  double prev = simpson(integrand, 0.0, 1.0, n);
  while (2 * n - 1 <= 4097) {
    n = 2 * n - 1;
    const double cur = simpson(integrand, 0.0, 1.0, n);
    if (std::abs(cur - prev) < 1e-14) return cur;
    prev = cur;
  }
  return prev;
}

/// g(f, x) = int_0^1 exp(l(r, x)) grad f(r x) dr. Simpson with node doubling
/// until the sup-norm change drops below 1e-8; throws ConvergenceError past
/// 4097 nodes.
inline Vector surrogate_exact(const LinearizationContext& ctx,
                              const Objective& f, std::span<const double> x) {
  require(x.size() == f.dim(), "surrogate_exact: dimension mismatch");
  auto integrate = [&](int n) {
    Vector acc(x.size(), 0.0);
    const double h = 1.0 / (n - 1);
    Vector rx(x.size());
    // r = u^2 smooths gradients that behave like r^a, a > -1/2, at the origin.
    for (int i = 1; i < n; ++i) {
      const double u = i * h, r = u * u;
      const double w = i == n - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0);
      for (std::size_t k = 0; k < x.size(); ++k) rx[k] = r * x[k];
      axpy(w * 2.0 * u * std::exp(ell(ctx, r, x)) * h / 3.0, f.gradient(rx), acc);
    }
    return acc;
  };
  int n = ctx.nodes;
  Vector prev = integrate(n);
  double residual = std::numeric_limits<double>::infinity();
  while (2 * n - 1 <= 4097) {
    n = 2 * n - 1;
    Vector cur = integrate(n);
    residual = sup_norm(sub(cur, prev));
    if (residual < 1e-8) return cur;
    prev = std::move(cur);
  }
  throw ConvergenceError("surrogate_exact: no convergence at 4097 nodes",
                         residual);
}

/// alpha_x = 1 - exp(-(gamma / R_theta) int_0^1 theta(s x) ds).
inline double alpha_at(const LinearizationContext& ctx,
                       std::span<const double> x) {
  return -std::expm1(ell(ctx, 0.0, x));
}

/// Global coefficient over a maximal convex subset K*: alpha_x minimized
/// over K*. Closed form for the homogeneous kinds; custom theta enumerates
/// the vertices of K* (d <= 20).
inline double alpha_star(const LinearizationContext& ctx,
                         const ConstraintSet& kstar) {
  double inner = 0.0;
  if (ctx.theta.is_power()) {
    inner = radial_bounds(kstar, ctx.theta).r_theta / (ctx.theta.sigma() + 1.0);
  } else {
    inner = std::numeric_limits<double>::infinity();
    for_each_vertex(kstar, [&](const Vector& v) {
      inner = std::min(inner, theta_ray_integral(ctx, 0.0, v));
    });
  }
  return -std::expm1(-ctx.gamma / ctx.R_theta * inner);
}

/// Distribution of Z_x on [0,1] with density proportional to exp(l(r, x)).
/// The CDF is tabulated on equal panels, each integrated by a single Simpson
/// step, so that the partial-panel formula used inside a panel meets the
/// tabulated value exactly at the panel boundary.
class ZDistribution {
 public:
  ZDistribution(const LinearizationContext& ctx, std::span<const double> x,
                int panels = 128)
      : ctx_(ctx), x_(x.begin(), x.end()), panels_(panels) {
    require(panels_ >= 1, "ZDistribution: panels must be >= 1");
    if (ctx.theta.is_power()) {
      const double q = ctx.theta.sigma() + 1.0;
      power_q_ = q;
      power_c_ = ctx.gamma / ctx.R_theta * ctx.theta(x) / q;
    }
    cum_.assign(panels_ + 1, 0.0);
    for (int j = 0; j < panels_; ++j)
      cum_[j + 1] = cum_[j] + partial(j, node(j + 1));
  }

  // Tabulated int_0^1 exp(l(r, x)) dr.
  double weight() const { return cum_.back(); }

  double cdf(double z) const {
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    const int j = std::min(static_cast<int>(z * panels_), panels_ - 1);
    return (cum_[j] + partial(j, z)) / cum_.back();
  }

  // Bisection on the strictly increasing CDF to cdf_tol in z (at most 60
  // halvings after the panel lookup).
  double quantile(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double target = u * cum_.back();
    int j = static_cast<int>(std::upper_bound(cum_.begin(), cum_.end(), target) -
                             cum_.begin()) - 1;
    j = std::clamp(j, 0, panels_ - 1);
    double lo = node(j);
    double hi = node(j + 1);
    for (int it = 0; it < 60 && hi - lo > ctx_.cdf_tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cum_[j] + partial(j, mid) < target) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  double sample(Rng& rng) const { return quantile(uniform01(rng)); }

 private:
  double node(int j) const { return static_cast<double>(j) / panels_; }

  double density(double r) const {
    if (power_q_ > 0.0) return std::exp(-power_c_ * (1.0 - std::pow(r, power_q_)));
    return std::exp(ell(ctx_, r, x_));
  }

  // Simpson on [node(j), z].
  double partial(int j, double z) const {
    const double a = node(j);
    const double h = z - a;
    if (h <= 0.0) return 0.0;
    return h / 6.0 * (density(a) + 4.0 * density(a + 0.5 * h) + density(z));
  }

  LinearizationContext ctx_;
  Vector x_;
  int panels_;
  double power_q_ = 0.0;
  double power_c_ = 0.0;
  std::vector<double> cum_;
};

inline double sample_z(const LinearizationContext& ctx,
                       std::span<const double> x, Rng& rng) {
  return ZDistribution(ctx, x).sample(rng);
}

struct SurrogateEstimate {
  Vector g;
  double weight = 0.0;
  double z = 0.0;
  int queries = 0;
};

/// Single-query unbiased estimate of g(f, x): draw z ~ Z_x, query the
/// first-order oracle at z x and scale by w(x).
inline SurrogateEstimate estimate_surrogate(const LinearizationContext& ctx,
                                            QueryOracle& oracle,
                                            std::span<const double> x,
                                            Rng& rng) {
  require(oracle.order() == OracleOrder::kFirst,
          "estimate_surrogate: needs a first-order oracle");
  const ZDistribution dist(ctx, x);
  SurrogateEstimate est;
  est.z = dist.sample(rng);
  est.weight = dist.weight();
  est.g = scaled(oracle.query_gradient(scaled(x, est.z)), est.weight);
  est.queries = 1;
  return est;
}

}  // namespace uplin
