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

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "uplin/objectives.hpp"
#include "uplin/types.hpp"

namespace uplin {

enum class OracleOrder { kFirst, kZeroth };

/// Additive zero-mean noise with compact support. Gaussian noise is not
/// offered: the declared bound must hold with probability one.
struct NoiseModel {
  enum class Kind { kNone, kBoundedUniform, kBoundedSphere };
  Kind kind = Kind::kNone;
  double radius = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel uniform_ball(double r) { return {Kind::kBoundedUniform, r}; }
  static NoiseModel sphere(double r) { return {Kind::kBoundedSphere, r}; }
  double effective_radius() const { return kind == Kind::kNone ? 0.0 : radius; }
};

/// Stochastic query oracle for one objective. Owns its generator and query
/// counter, so an instance must not be shared across threads.
class QueryOracle {
 public:
  QueryOracle(Objective f, OracleOrder order, NoiseModel noise,
              std::uint64_t seed)
      : f_(std::move(f)), order_(order), noise_(noise), rng_(seed) {
    require(noise_.radius >= 0.0, "oracle: noise radius must be >= 0");
    const double sup = order_ == OracleOrder::kFirst ? f_.gradient_bound()
                                                     : f_.value_bound();
    // Relative slack absorbs rounding in |signal + noise|; nothing is clipped.
    bound_ = (sup + noise_.effective_radius()) * (1.0 + 1e-12);
  }

  OracleOrder order() const { return order_; }
  double bound() const { return bound_; }
  std::uint64_t queries() const { return queries_; }
  const Objective& objective() const { return f_; }
  const NoiseModel& noise() const { return noise_; }

  Vector query_gradient(std::span<const double> y) {
    require(order_ == OracleOrder::kFirst, "oracle: not a first-order oracle");
    require(y.size() == f_.dim() && in_unit_box(y),
            "oracle: query point outside the unit box");
    ++queries_;
    Vector g = f_.gradient(y);
    if (noise_.kind != NoiseModel::Kind::kNone && noise_.radius > 0.0)
      axpy(1.0, draw_vector_noise(g.size()), g);
    return g;
  }

  double query_value(std::span<const double> y) {
    require(order_ == OracleOrder::kZeroth, "oracle: not a zeroth-order oracle");
    require(y.size() == f_.dim() && in_unit_box(y),
            "oracle: query point outside the unit box");
    ++queries_;
    double v = f_.value(y);
    switch (noise_.kind) {
      case NoiseModel::Kind::kNone:
        break;
      case NoiseModel::Kind::kBoundedUniform:
        v += noise_.radius * (2.0 * uniform01(rng_) - 1.0);
        break;
      case NoiseModel::Kind::kBoundedSphere:
        v += uniform01(rng_) < 0.5 ? -noise_.radius : noise_.radius;
        break;
    }
    return v;
  }

 private:
  Vector draw_vector_noise(std::size_t d) {
    std::normal_distribution<double> normal;
    Vector dir(d);
    double n = 0.0;
    do {
      for (double& v : dir) v = normal(rng_);
      n = norm2(dir);
    } while (n == 0.0);
    double r = noise_.radius;
    if (noise_.kind == NoiseModel::Kind::kBoundedUniform)
      r *= std::pow(uniform01(rng_), 1.0 / static_cast<double>(d));
    for (double& v : dir) v *= r / n;
    return dir;
  }

  Objective f_;
  OracleOrder order_;
  NoiseModel noise_;
  Rng rng_;
  double bound_ = 0.0;
  std::uint64_t queries_ = 0;
};

// {"model": "none"|"bounded_uniform"|"bounded_sphere", "radius": r}
inline NoiseModel noise_from_json(const nlohmann::json& j) {
  const std::string m = j.value("model", std::string("none"));
  const double r = j.value("radius", 0.0);
  require(r >= 0.0, "noise config: radius must be >= 0");
  if (m == "none") return NoiseModel::none();
  if (m == "bounded_uniform") return NoiseModel::uniform_ball(r);
  if (m == "bounded_sphere") return NoiseModel::sphere(r);
  throw std::invalid_argument("noise config: unknown model \"" + m + "\"");
}

inline nlohmann::json to_json(const NoiseModel& n) {
  const char* m = n.kind == NoiseModel::Kind::kNone ? "none"
                  : n.kind == NoiseModel::Kind::kBoundedUniform
                      ? "bounded_uniform"
                      : "bounded_sphere";
  return {{"model", m}, {"radius", n.radius}};
}

}  // namespace uplin
