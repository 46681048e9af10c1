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
#include <span>
#include <string>
#include <utility>

#include "uplin/types.hpp"

namespace uplin {

/// Monotone weighting function theta : [0,1]^d -> R>=0 that scales the
/// up-concavity inequalities. The power kinds are positively homogeneous,
/// theta(s x) = s^sigma theta(x), which every closed form in the library
/// relies on.
class ThetaSpec {
 public:
  enum class Kind { kConstantOne, kPNormPower, kCustom };
  using Fn = std::function<double(std::span<const double>)>;

  static ThetaSpec constant_one() { return ThetaSpec(Kind::kConstantOne); }

  static ThetaSpec p_norm_power(double p, double sigma) {
    require(p >= 1.0, "theta: p must be >= 1");
    require(sigma >= 0.0, "theta: sigma must be >= 0");
    ThetaSpec t(Kind::kPNormPower);
    t.p_ = p;
    t.sigma_ = sigma;
    return t;
  }

  static ThetaSpec custom(Fn fn, std::string name = "custom") {
    require(static_cast<bool>(fn), "theta: empty custom evaluator");
    ThetaSpec t(Kind::kCustom);
    t.fn_ = std::move(fn);
    t.name_ = std::move(name);
    return t;
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  // Homogeneity degree; zero for the constant kind.
  double sigma() const { return kind_ == Kind::kPNormPower ? sigma_ : 0.0; }
  bool is_power() const { return kind_ != Kind::kCustom; }
  const std::string& name() const { return name_; }

  double operator()(std::span<const double> x) const {
    switch (kind_) {
      case Kind::kConstantOne:
        return 1.0;
      case Kind::kPNormPower:
        // pow(0, 0) == 1 keeps sigma = 0 identical to the constant kind.
        return std::pow(pnorm(x, p_), sigma_);
      case Kind::kCustom:
        return fn_(x);
    }
    return 0.0;
  }

 private:
  explicit ThetaSpec(Kind k) : kind_(k) {
    if (k == Kind::kConstantOne) name_ = "constant_one";
    if (k == Kind::kPNormPower) name_ = "p_norm_power";
  }

  Kind kind_;
  double p_ = 1.0;
  double sigma_ = 0.0;
  Fn fn_;
  std::string name_;
};

/// Spot-checks monotonicity and positivity off the origin on random ordered
/// pairs. Returns false at the first failing pair.
inline bool spot_check_theta(const ThetaSpec& theta, std::size_t d,
                             std::size_t n_pairs, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Vector x = uniform_vector(d, rng);
    Vector y = x;
    for (double& v : y) v += (1.0 - v) * uniform01(rng);
    const double tx = theta(x);
    const double ty = theta(y);
    if (!(tx > 0.0) || tx > ty + 1e-12) return false;
  }
  return true;
}

}  // namespace uplin
