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
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "uplin/theta.hpp"
#include "uplin/types.hpp"

namespace uplin {

enum class Family {
  kBox,
  kUniformIndependence,
  kUniformBasis,
  kPartitionIndependence,
  kPartitionBasis,
  kSingleton,
};

inline const char* family_name(Family f) {
  switch (f) {
    case Family::kBox: return "box";
    case Family::kUniformIndependence: return "uniform_independence";
    case Family::kUniformBasis: return "uniform_basis";
    case Family::kPartitionIndependence: return "partition_independence";
    case Family::kPartitionBasis: return "partition_basis";
    case Family::kSingleton: return "singleton";
  }
  return "?";
}

struct RadialBounds {
  double r_theta = 0.0;
  double R_theta = 0.0;
};

/// A closed convex region inside [0,1]^d. Matroid families are stored as a
/// list of blocks with per-block caps; a uniform matroid is the one-block
/// case. Instances are immutable values.
class ConstraintSet {
 public:
  using Blocks = std::vector<std::vector<std::size_t>>;

  Family family() const { return family_; }
  std::size_t dim() const { return d_; }
  double diameter() const { return diameter_; }
  const Blocks& blocks() const { return blocks_; }
  const std::vector<std::size_t>& caps() const { return caps_; }
  const Vector& point() const { return point_; }

  bool is_matroid() const {
    return family_ != Family::kBox && family_ != Family::kSingleton;
  }
  bool is_basis() const {
    return family_ == Family::kUniformBasis ||
           family_ == Family::kPartitionBasis;
  }
  bool is_uniform() const {
    return family_ == Family::kUniformBasis ||
           family_ == Family::kUniformIndependence;
  }

  // Matroid rank; d for the box (its top vertex), |point|_1 for a singleton.
  double rank() const {
    if (is_matroid())
      return static_cast<double>(std::accumulate(caps_.begin(), caps_.end(),
                                                 std::size_t{0}));
    if (family_ == Family::kBox) return static_cast<double>(d_);
    return norm1(point_);
  }

  bool contains(std::span<const double> x, double tol = kMembershipTol) const {
    if (x.size() != d_) return false;
    if (family_ == Family::kSingleton) {
      for (std::size_t i = 0; i < d_; ++i)
        if (std::abs(x[i] - point_[i]) > tol) return false;
      return true;
    }
    if (!in_unit_box(x, tol)) return false;
    if (family_ == Family::kBox) return true;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      double s = 0.0;
      for (std::size_t j : blocks_[b]) s += x[j];
      const double cap = static_cast<double>(caps_[b]);
      if (s > cap + tol) return false;
      if (is_basis() && s < cap - tol) return false;
    }
    return true;
  }

  friend ConstraintSet make_box(std::size_t d);
  friend ConstraintSet make_uniform_matroid(std::size_t d, std::size_t k,
                                            bool basis);
  friend ConstraintSet make_partition_matroid(Blocks blocks,
                                              std::vector<std::size_t> caps,
                                              bool basis);
  friend ConstraintSet make_singleton(Vector point);
  friend ConstraintSet maximal_convex_subset(const ConstraintSet& k);

 private:
  ConstraintSet() = default;

  void compute_diameter() {
    switch (family_) {
      case Family::kBox:
        diameter_ = std::sqrt(static_cast<double>(d_));
        return;
      case Family::kSingleton:
        diameter_ = 0.0;
        return;
      default:
        break;
    }
    // The polytope is a product over blocks, so squared diameters add. Two
    // 0/1 vertices of a block differ in at most min(2c, n) coordinates
    // (independence) or 2 min(c, n - c) coordinates (basis).
    double sq = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const std::size_t n = blocks_[b].size();
      const std::size_t c = caps_[b];
      sq += static_cast<double>(is_basis() ? 2 * std::min(c, n - c)
                                           : std::min(2 * c, n));
    }
    diameter_ = std::sqrt(sq);
  }

  Family family_ = Family::kBox;
  std::size_t d_ = 0;
  Blocks blocks_;
  std::vector<std::size_t> caps_;
  Vector point_;
  double diameter_ = 0.0;
};

inline ConstraintSet make_box(std::size_t d) {
  require(d >= 1, "make_box: dimension must be >= 1");
  ConstraintSet k;
  k.family_ = Family::kBox;
  k.d_ = d;
  k.compute_diameter();
  return k;
}

inline ConstraintSet make_uniform_matroid(std::size_t d, std::size_t k,
                                          bool basis) {
  require(d >= 1, "make_uniform_matroid: dimension must be >= 1");
  require(k >= 1 && k <= d, "make_uniform_matroid: rank k must lie in [1, d]");
  ConstraintSet s;
  s.family_ = basis ? Family::kUniformBasis : Family::kUniformIndependence;
  s.d_ = d;
  s.blocks_.emplace_back(d);
  std::iota(s.blocks_[0].begin(), s.blocks_[0].end(), std::size_t{0});
  s.caps_ = {k};
  s.compute_diameter();
  return s;
}

/// Block indices are 0-based and must partition {0, ..., d-1}.
inline ConstraintSet make_partition_matroid(ConstraintSet::Blocks blocks,
                                            std::vector<std::size_t> caps,
                                            bool basis) {
  require(!blocks.empty(), "make_partition_matroid: no blocks");
  require(blocks.size() == caps.size(),
          "make_partition_matroid: one cap per block required");
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.size();
  std::vector<bool> seen(d, false);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    require(!blocks[i].empty(), "make_partition_matroid: empty block");
    require(caps[i] >= 1 && caps[i] <= blocks[i].size(),
            "make_partition_matroid: cap out of range for block " +
                std::to_string(i));
    for (std::size_t j : blocks[i]) {
      require(j < d, "make_partition_matroid: blocks do not cover {0..d-1}");
      require(!seen[j], "make_partition_matroid: overlapping blocks at index " +
                            std::to_string(j));
      seen[j] = true;
    }
    std::sort(blocks[i].begin(), blocks[i].end());
  }
  ConstraintSet s;
  s.family_ = basis ? Family::kPartitionBasis : Family::kPartitionIndependence;
  s.d_ = d;
  s.blocks_ = std::move(blocks);
  s.caps_ = std::move(caps);
  s.compute_diameter();
  return s;
}

inline ConstraintSet make_singleton(Vector point) {
  require(!point.empty(), "make_singleton: empty point");
  require(in_unit_box(point, 0.0), "make_singleton: point outside [0,1]^d");
  ConstraintSet s;
  s.family_ = Family::kSingleton;
  s.d_ = point.size();
  s.point_ = std::move(point);
  s.compute_diameter();
  return s;
}

/// K* = conv(K^m): the top vertex for the box, the basis polytope for a
/// matroid independence polytope, and the set itself otherwise.
inline ConstraintSet maximal_convex_subset(const ConstraintSet& k) {
  switch (k.family()) {
    case Family::kBox:
      return make_singleton(Vector(k.dim(), 1.0));
    case Family::kUniformIndependence:
    case Family::kPartitionIndependence: {
      ConstraintSet s = k;
      s.family_ = k.family() == Family::kUniformIndependence
                      ? Family::kUniformBasis
                      : Family::kPartitionBasis;
      s.compute_diameter();
      return s;
    }
    case Family::kUniformBasis:
    case Family::kPartitionBasis:
    case Family::kSingleton:
      return k;
  }
  throw std::invalid_argument("maximal_convex_subset: unsupported family");
}

namespace detail {

// Euclidean projection of y onto {z in [0,1]^n : sum z = s}. The solution is
// z_i = clamp(y_i - tau, 0, 1); tau is located by sweeping the sorted
// breakpoints {y_i - 1, y_i} of the piecewise-linear map tau -> sum z(tau).
inline Vector project_capped_simplex(std::span<const double> y, double s) {
  const std::size_t n = y.size();
  Vector z(n);
  if (s <= 0.0) return z;
  if (s >= static_cast<double>(n)) {
    std::fill(z.begin(), z.end(), 1.0);
    return z;
  }
  struct Event {
    double tau;
    std::size_t index;
    int slope_change;  // -1: term starts decreasing, +1: term hits zero
  };
  std::vector<Event> events;
  events.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({y[i] - 1.0, i, -1});
    events.push_back({y[i], i, +1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.tau != b.tau) return a.tau < b.tau;
    return a.index < b.index;
  });
  double value = static_cast<double>(n);
  int active = 0;
  double prev = events.front().tau;
  double tau = events.back().tau;
  for (const Event& e : events) {
    const double next = value - active * (e.tau - prev);
    if (next <= s && active > 0) {
      tau = prev + (value - s) / active;
      break;
    }
    value = next;
    prev = e.tau;
    active -= e.slope_change;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = std::clamp(y[i] - tau, 0.0, 1.0);
  return z;
}

inline Vector project_capped_simplex_leq(std::span<const double> y, double s) {
  Vector z(y.begin(), y.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::clamp(v, 0.0, 1.0);
    total += v;
  }
  if (total <= s) return z;
  return project_capped_simplex(y, s);
}

}  // namespace detail

/// Euclidean projection onto K. Matroid families project block by block.
inline Vector project(const ConstraintSet& k, std::span<const double> x) {
  require(x.size() == k.dim(), "project: dimension mismatch");
  switch (k.family()) {
    case Family::kSingleton:
      return k.point();
    case Family::kBox: {
      Vector out(x.begin(), x.end());
      for (double& v : out) v = std::clamp(v, 0.0, 1.0);
      return out;
    }
    default:
      break;
  }
  Vector out(k.dim());
  Vector sub;
  for (std::size_t b = 0; b < k.blocks().size(); ++b) {
    const auto& block = k.blocks()[b];
    sub.resize(block.size());
    for (std::size_t j = 0; j < block.size(); ++j) sub[j] = x[block[j]];
    const double cap = static_cast<double>(k.caps()[b]);
    const Vector z = k.is_basis() ? detail::project_capped_simplex(sub, cap)
                                  : detail::project_capped_simplex_leq(sub, cap);
    for (std::size_t j = 0; j < block.size(); ++j) out[block[j]] = z[j];
  }
  return out;
}

/// Calls fn on every vertex of K. Refuses d > max_dim since the count is
/// exponential.
inline void for_each_vertex(const ConstraintSet& k,
                            const std::function<void(const Vector&)>& fn,
                            std::size_t max_dim = 20) {
  require(k.dim() <= max_dim, "vertex enumeration limited to d <= " +
                                  std::to_string(max_dim));
  if (k.family() == Family::kSingleton) {
    fn(k.point());
    return;
  }
  const std::size_t d = k.dim();
  std::vector<std::size_t> block_of(d, 0);
  std::vector<std::size_t> cap(1, d);
  std::vector<std::size_t> remaining_slots(1, d);
  bool exact = false;
  if (k.is_matroid()) {
    cap = k.caps();
    remaining_slots.assign(k.blocks().size(), 0);
    for (std::size_t b = 0; b < k.blocks().size(); ++b) {
      remaining_slots[b] = k.blocks()[b].size();
      for (std::size_t j : k.blocks()[b]) block_of[j] = b;
    }
    exact = k.is_basis();
  }
  std::vector<std::size_t> used(cap.size(), 0);
  Vector v(d, 0.0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == d) {
      fn(v);
      return;
    }
    const std::size_t b = block_of[i];
    --remaining_slots[b];
    // Leave coordinate i at zero only if the block can still reach its cap.
    if (!exact || used[b] + remaining_slots[b] >= cap[b]) {
      v[i] = 0.0;
      rec(i + 1);
    }
    if (used[b] < cap[b]) {
      v[i] = 1.0;
      ++used[b];
      rec(i + 1);
      --used[b];
      v[i] = 0.0;
    }
    ++remaining_slots[b];
  };
  rec(0);
}

inline std::vector<Vector> vertices(const ConstraintSet& k,
                                    std::size_t max_dim = 20) {
  std::vector<Vector> out;
  for_each_vertex(k, [&](const Vector& v) { out.push_back(v); }, max_dim);
  return out;
}

/// Lexicographically smallest vertex: within each block the ones go to the
/// highest indices.
inline Vector first_vertex(const ConstraintSet& k) {
  switch (k.family()) {
    case Family::kSingleton:
      return k.point();
    case Family::kBox:
    case Family::kUniformIndependence:
    case Family::kPartitionIndependence:
      return Vector(k.dim(), 0.0);
    default:
      break;
  }
  Vector v(k.dim(), 0.0);
  for (std::size_t b = 0; b < k.blocks().size(); ++b) {
    const auto& block = k.blocks()[b];
    for (std::size_t j = block.size() - k.caps()[b]; j < block.size(); ++j)
      v[block[j]] = 1.0;
  }
  return v;
}

/// argmax over K of <c, x>, attained at a vertex. Ties go to lower indices.
inline Vector linear_maximize(const ConstraintSet& k,
                              std::span<const double> c) {
  require(c.size() == k.dim(), "linear_maximize: dimension mismatch");
  if (k.family() == Family::kSingleton) return k.point();
  Vector v(k.dim(), 0.0);
  if (k.family() == Family::kBox) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c[i] > 0.0 ? 1.0 : 0.0;
    return v;
  }
  for (std::size_t b = 0; b < k.blocks().size(); ++b) {
    std::vector<std::size_t> order = k.blocks()[b];
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return c[i] > c[j]; });
    for (std::size_t j = 0; j < k.caps()[b]; ++j) {
      if (!k.is_basis() && c[order[j]] <= 0.0) break;
      v[order[j]] = 1.0;
    }
  }
  return v;
}

/// Random point of K: half the draws project a scaled uniform point, the
/// other half mix three random vertices.
inline Vector sample_point(const ConstraintSet& k, Rng& rng) {
  const std::size_t d = k.dim();
  if (k.family() == Family::kSingleton) return k.point();
  if (uniform01(rng) < 0.5) {
    Vector u = uniform_vector(d, rng);
    const double scale = 2.0 * uniform01(rng);
    for (double& v : u) v *= scale;
    return project(k, u);
  }
  Vector out(d, 0.0);
  double wsum = 0.0;
  for (int m = 0; m < 3; ++m) {
    Vector c(d);
    for (double& v : c) v = uniform01(rng) - 0.25;
    Vector vert = linear_maximize(k, c);
    const double w = uniform01(rng) + 1e-3;
    axpy(w, vert, out);
    wsum += w;
  }
  for (double& v : out) v /= wsum;
  return out;
}

/// r_theta = min over K* of theta, R_theta = max over K of theta.
inline RadialBounds radial_bounds(const ConstraintSet& k,
                                  const ThetaSpec& theta) {
  if (theta.kind() == ThetaSpec::Kind::kConstantOne) return {1.0, 1.0};
  if (k.family() == Family::kSingleton) {
    const double t = theta(k.point());
    return {t, t};
  }
  if (k.family() == Family::kBox) {
    const double t = theta(Vector(k.dim(), 1.0));
    return {t, t};
  }
  if (theta.kind() == ThetaSpec::Kind::kPNormPower) {
    // ||x||_p^p is maximized at a vertex with rho ones and minimized over the
    // basis polytope by spreading each cap evenly across its block.
    const double p = theta.p();
    const double sigma = theta.sigma();
    double min_pow = 0.0;
    for (std::size_t b = 0; b < k.blocks().size(); ++b) {
      const double n = static_cast<double>(k.blocks()[b].size());
      const double c = static_cast<double>(k.caps()[b]);
      min_pow += n * std::pow(c / n, p);
    }
    const double R_p = std::pow(k.rank(), 1.0 / p);
    const double r_p = p == 1.0 ? k.rank() : std::pow(min_pow, 1.0 / p);
    return {std::pow(r_p, sigma), std::pow(R_p, sigma)};
  }
  // Custom theta: vertex enumeration over K* (min) and K (max).
  const ConstraintSet star = maximal_convex_subset(k);
  RadialBounds rb{std::numeric_limits<double>::infinity(), 0.0};
  for_each_vertex(star,
                  [&](const Vector& v) { rb.r_theta = std::min(rb.r_theta, theta(v)); });
  for_each_vertex(k,
                  [&](const Vector& v) { rb.R_theta = std::max(rb.R_theta, theta(v)); });
  return rb;
}

struct Inside {};

struct Hyperplane {
  Vector normal;
  double offset = 0.0;  // <normal, y> <= offset for all y in K
};

using Separation = std::variant<Inside, Hyperplane>;

/// Returns the most violated constraint, or Inside when x is a member within
/// kMembershipTol.
inline Separation separate(const ConstraintSet& k, std::span<const double> x) {
  require(x.size() == k.dim(), "separate: dimension mismatch");
  const std::size_t d = k.dim();
  if (k.family() == Family::kSingleton) {
    if (k.contains(x)) return Inside{};
    Vector n = sub(x, k.point());
    const double off = dot(n, k.point());
    return Hyperplane{std::move(n), off};
  }
  double worst = kMembershipTol;
  std::optional<Hyperplane> cut;
  auto consider = [&](double violation, auto&& make) {
    if (violation > worst) {
      worst = violation;
      cut = make();
    }
  };
  for (std::size_t i = 0; i < d; ++i) {
    consider(x[i] - 1.0, [&] {
      Vector n(d, 0.0);
      n[i] = 1.0;
      return Hyperplane{std::move(n), 1.0};
    });
    consider(-x[i], [&] {
      Vector n(d, 0.0);
      n[i] = -1.0;
      return Hyperplane{std::move(n), 0.0};
    });
  }
  for (std::size_t b = 0; b < k.blocks().size(); ++b) {
    const auto& block = k.blocks()[b];
    double s = 0.0;
    for (std::size_t j : block) s += x[j];
    const double cap = static_cast<double>(k.caps()[b]);
    consider(s - cap, [&] {
      Vector n(d, 0.0);
      for (std::size_t j : block) n[j] = 1.0;
      return Hyperplane{std::move(n), cap};
    });
    if (k.is_basis()) {
      consider(cap - s, [&] {
        Vector n(d, 0.0);
        for (std::size_t j : block) n[j] = -1.0;
        return Hyperplane{std::move(n), -cap};
      });
    }
  }
  if (cut) return *cut;
  return Inside{};
}

// JSON form: {"family": "box"|"uniform_matroid"|"partition_matroid"|
// "singleton", "d": int, "k": int, "blocks": [[int]], "caps": [int],
// "basis": bool, "point": [double]}.
inline nlohmann::json to_json(const ConstraintSet& k) {
  nlohmann::json j;
  j["d"] = k.dim();
  switch (k.family()) {
    case Family::kBox:
      j["family"] = "box";
      break;
    case Family::kSingleton:
      j["family"] = "singleton";
      j["point"] = k.point();
      break;
    case Family::kUniformIndependence:
    case Family::kUniformBasis:
      j["family"] = "uniform_matroid";
      j["k"] = k.caps()[0];
      j["basis"] = k.is_basis();
      break;
    case Family::kPartitionIndependence:
    case Family::kPartitionBasis:
      j["family"] = "partition_matroid";
      j["blocks"] = k.blocks();
      j["caps"] = k.caps();
      j["basis"] = k.is_basis();
      break;
  }
  return j;
}

inline ConstraintSet constraint_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("family"),
          "constraint config: missing \"family\"");
  const std::string fam = j.at("family").get<std::string>();
  const bool basis = j.value("basis", false);
  if (fam == "box") return make_box(j.at("d").get<std::size_t>());
  if (fam == "singleton") return make_singleton(j.at("point").get<Vector>());
  if (fam == "uniform_matroid" || fam == "uniform") {
    return make_uniform_matroid(j.at("d").get<std::size_t>(),
                                j.at("k").get<std::size_t>(), basis);
  }
  if (fam == "partition_matroid" || fam == "partition") {
    auto k = make_partition_matroid(
        j.at("blocks").get<ConstraintSet::Blocks>(),
        j.at("caps").get<std::vector<std::size_t>>(), basis);
    if (j.contains("d"))
      require(j.at("d").get<std::size_t>() == k.dim(),
              "constraint config: \"d\" disagrees with blocks");
    return k;
  }
  throw std::invalid_argument("constraint config: unknown family \"" + fam + "\"");
}

}  // namespace uplin
