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
#include <stdexcept>
#include <span>

#include "uplin/objectives.hpp"
#include "uplin/theta.hpp"
#include "uplin/types.hpp"

namespace uplin {

/// Numerical certificate for one of the class inequalities. Violations are
/// the largest positive excess seen over all tested pairs; the witness is the
/// pair that produced the larger of the two.
struct MembershipReport {
  std::size_t tested = 0;
  double lower_violation = 0.0;
  double upper_violation = 0.0;
  Vector witness_x;
  Vector witness_y;

  double max_violation() const {
    return std::max(lower_violation, upper_violation);
  }
};

namespace detail {

inline void record(MembershipReport& rep, double lower, double upper,
                   std::span<const double> x, std::span<const double> y) {
  lower = std::max(lower, 0.0);
  upper = std::max(upper, 0.0);
  const double before = rep.max_violation();
  rep.lower_violation = std::max(rep.lower_violation, lower);
  rep.upper_violation = std::max(rep.upper_violation, upper);
  if (rep.max_violation() > before || rep.witness_x.empty()) {
    rep.witness_x.assign(x.begin(), x.end());
    rep.witness_y.assign(y.begin(), y.end());
  }
}

// x uniform on the box away from the origin; y = x + u (1 - x), u uniform.
inline std::pair<Vector, Vector> ordered_pair(std::size_t d, Rng& rng) {
  Vector x;
  do {
    x = uniform_vector(d, rng);
  } while (sup_norm(x) < 1e-3);
  Vector y = x;
  for (double& v : y) v += (1.0 - v) * uniform01(rng);
  return {std::move(x), std::move(y)};
}

}  // namespace detail

/// Tests both sides of
///   gamma th(x)/th(y) <grad f(y), y-x>  <=  f(y) - f(x)
///                                       <=  th(y)/(gamma th(x)) <grad f(x), y-x>
/// on random pairs y >= x != 0.
inline MembershipReport check_up_concave(const Objective& f, double gamma,
                                         const ThetaSpec& theta,
                                         std::size_t n_pairs,
                                         std::uint64_t seed) {
  require(n_pairs >= 1, "check_up_concave: n_pairs must be >= 1");
  require(gamma > 0.0 && gamma <= 1.0, "check_up_concave: gamma in (0,1]");
  Rng rng(seed);
  MembershipReport rep;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    auto [x, y] = detail::ordered_pair(f.dim(), rng);
    const Vector diff = sub(y, x);
    const double inc = f.value(y) - f.value(x);
    const double tx = theta(x);
    const double ty = theta(y);
    const double lower = gamma * tx / ty * dot(f.gradient(y), diff) - inc;
    const double upper = inc - ty / (gamma * tx) * dot(f.gradient(x), diff);
    detail::record(rep, lower, upper, x, y);
    ++rep.tested;
  }
  return rep;
}

/// u^T H u by central differences of the gradient along u.
inline double hessian_quadratic_form(const Objective& f,
                                     std::span<const double> x,
                                     std::span<const double> u,
                                     double step = 1e-4) {
  Vector xp(x.begin(), x.end());
  Vector xm(x.begin(), x.end());
  axpy(step, u, xp);
  axpy(-step, u, xm);
  return dot(u, sub(f.gradient(xp), f.gradient(xm))) / (2.0 * step);
}

/// sigma-OSS: 1/2 u^T hess f(x) u <= sigma |u|_1/|x|_1 u^T grad f(x) for
/// u >= 0. The violation is reported in upper_violation; the witness is
/// (x, u).
inline MembershipReport check_oss(const Objective& f, double sigma,
                                  std::size_t n_points, std::uint64_t seed) {
  require(n_points >= 1, "check_oss: n_points must be >= 1");
  Rng rng(seed);
  MembershipReport rep;
  for (std::size_t i = 0; i < n_points; ++i) {
    Vector x;
    do {
      x = uniform_vector(f.dim(), rng);
    } while (sup_norm(x) < 1e-2);
    const Vector u = uniform_vector(f.dim(), rng);
    const double lhs = 0.5 * hessian_quadratic_form(f, x, u);
    const double rhs = sigma * norm1(u) / norm1(x) * dot(u, f.gradient(x));
    detail::record(rep, 0.0, lhs - rhs, x, u);
    ++rep.tested;
  }
  return rep;
}

struct ContainmentReport {
  MembershipReport up_sigma;      // (1,1,sigma)-up-concavity
  MembershipReport oss;           // sigma-OSS
  MembershipReport up_two_sigma;  // (1,1,2 sigma)-up-concavity
};

inline ContainmentReport check_containment(const Objective& f, double sigma,
                                           std::size_t n, std::uint64_t seed) {
  return {check_up_concave(f, 1.0, ThetaSpec::p_norm_power(1.0, sigma), n, seed),
          check_oss(f, sigma, n, seed + 1),
          check_up_concave(f, 1.0, ThetaSpec::p_norm_power(1.0, 2.0 * sigma), n,
                           seed + 2)};
}

/// Along random segments phi(t) = x + t (y - x), y >= x, the quantity
/// q(t) = <grad f(phi(t)), y - x> / |phi(t)|_1^(2 sigma) must not increase
/// for a sigma-OSS function. Returns the largest increase between
/// consecutive grid points.
inline double check_ray_lyapunov(const Objective& f, double sigma,
                                 std::size_t n_segments, std::size_t grid,
                                 std::uint64_t seed) {
  require(grid >= 2, "check_ray_lyapunov: grid must be >= 2");
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < n_segments; ++s) {
    auto [x, y] = detail::ordered_pair(f.dim(), rng);
    const Vector diff = sub(y, x);
    double prev = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(grid - 1);
      Vector phi = x;
      axpy(t, diff, phi);
      const double q =
          dot(f.gradient(phi), diff) / std::pow(norm1(phi), 2.0 * sigma);
      if (k > 0) worst = std::max(worst, q - prev);
      prev = q;
    }
  }
  return worst;
}

/// Largest relative mismatch between the gradient and central differences
/// of the value, max_i |fd_i - g_i| / max(1, |g_i|).
inline double gradient_error(const Objective& f, std::size_t n_points,
                             std::uint64_t seed, double step = 1e-5) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t n = 0; n < n_points; ++n) {
    Vector x = uniform_vector(f.dim(), rng);
    for (double& v : x) v = step + (1.0 - 2.0 * step) * v;
    const Vector g = f.gradient(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Vector xp = x, xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
    }
  }
  return worst;
}

/// Smallest gradient coordinate seen at random points of the box.
inline double min_gradient(const Objective& f, std::size_t n_points,
                           std::uint64_t seed) {
  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < n_points; ++n) {
    for (double g : f.gradient(uniform_vector(f.dim(), rng))) lo = std::min(lo, g);
  }
  return lo;
}

inline constexpr double kCertifyTol = 1e-9;
inline constexpr double kCertifyGrid = 1e-3;

namespace detail {

// Smallest grid value in [0, hi] for which pass() holds; pass must be
// monotone. Returns a negative value when even hi fails.
template <class Pass>
double smallest_passing(double hi, Pass&& pass) {
  long lo_i = 0;
  long hi_i = std::lround(hi / kCertifyGrid);
  if (!pass(static_cast<double>(hi_i) * kCertifyGrid)) return -1.0;
  if (pass(0.0)) return 0.0;
  while (hi_i - lo_i > 1) {
    const long mid = (lo_i + hi_i) / 2;
    if (pass(static_cast<double>(mid) * kCertifyGrid)) hi_i = mid;
    else lo_i = mid;
  }
  return static_cast<double>(hi_i) * kCertifyGrid;
}

}  // namespace detail

/// Tightest sigma on a 1e-3 grid for which f passes the gamma-weak
/// (p, sigma)-up-concavity check with violation <= kCertifyTol. Both sides of
/// the inequality relax as sigma grows, so bisection applies. Throws if no
/// sigma <= sigma_max passes.
inline Objective certify_p_sigma(const Objective& f, double gamma, double p,
                                 std::size_t n_pairs, std::uint64_t seed,
                                 double sigma_max = 8.0) {
  const double sigma = detail::smallest_passing(sigma_max, [&](double s) {
    return check_up_concave(f, gamma, ThetaSpec::p_norm_power(p, s), n_pairs, seed)
               .max_violation() <= kCertifyTol;
  });
  if (sigma < 0.0)
    throw std::runtime_error("certify_p_sigma: no sigma <= sigma_max passes");
  return f.with_tag({ClassTag::Kind::kPSigma, gamma, p, sigma});
}

/// Tightest OSS sigma on a 1e-3 grid, accepting violations up to tol (the
/// Hessian is a finite-difference estimate).
inline Objective certify_oss(const Objective& f, std::size_t n_points,
                             std::uint64_t seed, double tol = 1e-4,
                             double sigma_max = 8.0) {
  const double sigma = detail::smallest_passing(sigma_max, [&](double s) {
    return check_oss(f, s, n_points, seed).max_violation() <= tol;
  });
  if (sigma < 0.0)
    throw std::runtime_error("certify_oss: no sigma <= sigma_max passes");
  return f.with_tag({ClassTag::Kind::kOss, 1.0, 1.0, sigma});
}

}  // namespace uplin
