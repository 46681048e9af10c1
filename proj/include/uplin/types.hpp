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
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uplin {

using Vector = std::vector<double>;
using Rng = std::mt19937_64;

// Absolute tolerance on every linear constraint of a feasible region.
inline constexpr double kMembershipTol = 1e-9;

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Raised when an adaptive quadrature hits its node cap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (last residual " +
                           std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double sup_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline double pnorm(std::span<const double> a, double p) {
  if (p == 1.0) return norm1(a);
  if (p == 2.0) return norm2(a);
  double s = 0.0;
  for (double v : a) s += std::pow(std::abs(v), p);
  return std::pow(s, 1.0 / p);
}

inline double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

inline Vector add(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Vector sub(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline Vector scaled(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

// out += s * a
inline void axpy(double s, std::span<const double> a, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * a[i];
}

inline bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::isfinite(v); });
}

inline bool in_unit_box(std::span<const double> a, double tol = kMembershipTol) {
  return std::all_of(a.begin(), a.end(),
                     [tol](double v) { return v >= -tol && v <= 1.0 + tol; });
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Vector uniform_vector(std::size_t d, Rng& rng) {
  Vector v(d);
  for (double& x : v) x = uniform01(rng);
  return v;
}

}  // namespace uplin

namespace uplin {

// Stateless 64-bit mixer used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed27ULL));
}

}  // namespace uplin
