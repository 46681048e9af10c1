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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "uplin/types.hpp"

namespace uplin {

/// Declared function-class membership. Built-in constructors set the class
/// that holds by construction; the certify_* routines in class_checks.hpp
/// replace it with the tightest numerically certified parameters.
struct ClassTag {
  enum class Kind { kUnknown, kDrSubmodular, kUpConcave, kPSigma, kOss };
  Kind kind = Kind::kUnknown;
  double gamma = 1.0;
  double p = 1.0;
  double sigma = 0.0;
};

inline const char* class_kind_name(ClassTag::Kind k) {
  switch (k) {
    case ClassTag::Kind::kUnknown: return "unknown";
    case ClassTag::Kind::kDrSubmodular: return "dr_submodular";
    case ClassTag::Kind::kUpConcave: return "up_concave";
    case ClassTag::Kind::kPSigma: return "p_sigma";
    case ClassTag::Kind::kOss: return "oss";
  }
  return "?";
}

/// Differentiable monotone f : [0,1]^d -> R>=0 with an exact gradient.
/// Immutable; copies share the evaluators.
class Objective {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<Vector(std::span<const double>)>;

  Objective(std::size_t d, ValueFn value, GradFn grad, ClassTag tag,
            double grad_bound, std::string name)
      : d_(d),
        value_(std::make_shared<ValueFn>(std::move(value))),
        grad_(std::make_shared<GradFn>(std::move(grad))),
        tag_(tag),
        grad_bound_(grad_bound),
        name_(std::move(name)) {
    require(d_ >= 1, "objective: dimension must be >= 1");
    // Monotone, so the supremum over the unit box sits at the all-ones point.
    value_bound_ = (*value_)(Vector(d_, 1.0));
  }

  std::size_t dim() const { return d_; }
  double value(std::span<const double> x) const { return (*value_)(x); }
  Vector gradient(std::span<const double> x) const { return (*grad_)(x); }
  const ClassTag& tag() const { return tag_; }
  double value_bound() const { return value_bound_; }
  // sup over [0,1]^d of ||grad f||_2.
  double gradient_bound() const { return grad_bound_; }
  const std::string& name() const { return name_; }

  Objective with_tag(ClassTag tag) const {
    Objective o = *this;
    o.tag_ = tag;
    return o;
  }

 private:
  std::size_t d_;
  std::shared_ptr<const ValueFn> value_;
  std::shared_ptr<const GradFn> grad_;
  ClassTag tag_;
  double grad_bound_;
  double value_bound_ = 0.0;
  std::string name_;
};

inline Objective make_linear(Vector a) {
  require(!a.empty(), "make_linear: empty coefficient vector");
  for (double v : a) require(v >= 0.0, "make_linear: coefficients must be >= 0");
  const double b = norm2(a);
  const std::size_t d = a.size();
  auto shared = std::make_shared<const Vector>(std::move(a));
  return Objective(
      d, [shared](std::span<const double> x) { return dot(*shared, x); },
      [shared](std::span<const double>) { return *shared; },
      {ClassTag::Kind::kDrSubmodular, 1.0, 1.0, 0.0}, b, "linear");
}

/// f(x) = a^T x - 1/2 x^T H x with H symmetric, entrywise nonnegative and
/// a >= H 1, so that 0 <= grad f <= a on the unit box.
inline Objective make_monotone_quadratic(Vector a, std::vector<Vector> H) {
  const std::size_t d = a.size();
  require(d >= 1, "make_monotone_quadratic: empty a");
  require(H.size() == d, "make_monotone_quadratic: H must be d x d");
  Vector flat(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    require(H[i].size() == d, "make_monotone_quadratic: H must be d x d");
    require(a[i] >= 0.0, "make_monotone_quadratic: a must be >= 0");
    double row = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      require(H[i][j] >= 0.0, "make_monotone_quadratic: H must be >= 0");
      require(std::abs(H[i][j] - H[j][i]) <= 1e-12,
              "make_monotone_quadratic: H must be symmetric");
      flat[i * d + j] = H[i][j];
      row += H[i][j];
    }
    require(a[i] >= row - 1e-12,
            "make_monotone_quadratic: need a >= H 1 (monotone on [0,1]^d)");
  }
  struct Data {
    Vector a, h;
    std::size_t d;
  };
  auto data = std::make_shared<const Data>(Data{a, std::move(flat), d});
  auto hx = [data](std::span<const double> x) {
    Vector out(data->d, 0.0);
    for (std::size_t i = 0; i < data->d; ++i)
      for (std::size_t j = 0; j < data->d; ++j)
        out[i] += data->h[i * data->d + j] * x[j];
    return out;
  };
  return Objective(
      d,
      [data, hx](std::span<const double> x) {
        return dot(data->a, x) - 0.5 * dot(x, hx(x));
      },
      [data, hx](std::span<const double> x) { return sub(data->a, hx(x)); },
      {ClassTag::Kind::kDrSubmodular, 1.0, 1.0, 0.0}, norm2(a), "quadratic");
}

/// f(x) = (sum_i x_i)^m, which equals ||x||_1^m on the nonnegative orthant.
/// The class parameters are left for the checker to certify.
inline Objective make_norm_power(std::size_t d, double m) {
  require(d >= 1, "make_norm_power: dimension must be >= 1");
  require(m >= 1.0, "make_norm_power: exponent must be >= 1");
  const double dd = static_cast<double>(d);
  const double b = m * std::pow(dd, m - 1.0) * std::sqrt(dd);
  return Objective(
      d,
      [m](std::span<const double> x) {
        const double s = sum(x);
        return s > 0.0 ? std::pow(s, m) : 0.0;
      },
      [m, d](std::span<const double> x) {
        const double s = sum(x);
        const double g = s > 0.0 ? m * std::pow(s, m - 1.0) : (m == 1.0 ? 1.0 : 0.0);
        return Vector(d, g);
      },
      {ClassTag::Kind::kUnknown, 1.0, 1.0, 0.0}, b, "norm_power");
}

/// sum_i w_i f_i with w_i >= 0; the class tag is dropped.
inline Objective make_weighted_sum(std::vector<Objective> parts,
                                   std::vector<double> weights) {
  require(!parts.empty() && parts.size() == weights.size(),
          "make_weighted_sum: need one weight per objective");
  const std::size_t d = parts.front().dim();
  double b = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(parts[i].dim() == d, "make_weighted_sum: dimension mismatch");
    require(weights[i] >= 0.0, "make_weighted_sum: weights must be >= 0");
    b += weights[i] * parts[i].gradient_bound();
  }
  auto ps = std::make_shared<const std::vector<Objective>>(std::move(parts));
  auto ws = std::make_shared<const std::vector<double>>(std::move(weights));
  return Objective(
      d,
      [ps, ws](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < ps->size(); ++i)
          if ((*ws)[i] != 0.0) v += (*ws)[i] * (*ps)[i].value(x);
        return v;
      },
      [ps, ws, d](std::span<const double> x) {
        Vector g(d, 0.0);
        for (std::size_t i = 0; i < ps->size(); ++i)
          if ((*ws)[i] != 0.0) axpy((*ws)[i], (*ps)[i].gradient(x), g);
        return g;
      },
      {}, b, "weighted_sum");
}

/// Random DR-submodular quadratic: H_ij ~ U[0, scale] symmetric and
/// a = H 1 + U[0.5, 1.5] coordinate-wise.
inline Objective make_random_monotone_quadratic(std::size_t d,
                                                std::uint64_t seed,
                                                double scale = 1.0) {
  Rng rng(seed);
  std::vector<Vector> H(d, Vector(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) H[i][j] = H[j][i] = scale * uniform01(rng);
  Vector a(d);
  for (std::size_t i = 0; i < d; ++i) a[i] = sum(H[i]) + 0.5 + uniform01(rng);
  return make_monotone_quadratic(std::move(a), std::move(H));
}

// {"type": "linear", "a": [..]} | {"type": "quadratic", "a": [..], "H": [[..]]}
// | {"type": "random_quadratic", "d": n, "seed": s, "scale": c}
// | {"type": "norm_power", "d": n, "m": m}
inline Objective objective_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("type"), "objective config: missing \"type\"");
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") return make_linear(j.at("a").get<Vector>());
  if (type == "quadratic")
    return make_monotone_quadratic(j.at("a").get<Vector>(),
                                   j.at("H").get<std::vector<Vector>>());
  if (type == "random_quadratic")
    return make_random_monotone_quadratic(j.at("d").get<std::size_t>(),
                                          j.value("seed", std::uint64_t{0}),
                                          j.value("scale", 1.0));
  if (type == "norm_power")
    return make_norm_power(j.at("d").get<std::size_t>(), j.at("m").get<double>());
  throw std::invalid_argument("objective config: unknown type \"" + type + "\"");
}

}  // namespace uplin
