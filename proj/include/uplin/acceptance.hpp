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
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uplin/class_checks.hpp"
#include "uplin/comparator.hpp"
#include "uplin/domains.hpp"
#include "uplin/experiment.hpp"
#include "uplin/linearization.hpp"
#include "uplin/objectives.hpp"
#include "uplin/online.hpp"
#include "uplin/oracles.hpp"

namespace uplin {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

inline std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " ("
     << r.name << "): " << r.detail << " [" << std::fixed << r.seconds
     << " s / limit " << r.time_limit << " s]";
  return os.str();
}

inline nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id},         {"name", r.name},       {"passed", r.passed},
          {"detail", r.detail}, {"seconds", r.seconds}, {"time_limit", r.time_limit}};
}

namespace acceptance {

// Checks accumulate into one verdict; detail collects measured values.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += what + (ok ? "" : " <-- FAILED");
  }
  bool ok() const { return ok_; }
  const std::string& detail() const { return detail_; }

 private:
  bool ok_ = true;
  std::string detail_;
};

inline std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

inline CriterionResult timed(int id, std::string name, double limit,
                             const std::function<void(Verdict&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.time_limit = limit;
  v.check(r.seconds < limit, "runtime " + num(r.seconds, 3) + " s < " + num(limit) + " s");
  r.passed = v.ok();
  r.detail = v.detail();
  return r;
}

/// CDF of Z_x for homogeneous theta from the power series of
/// exp(c r^q): int_0^z = sum_n c^n z^(qn+1) / (n! (qn+1)).
inline double series_cdf(double c, double q, double z) {
  auto partial = [&](double zz) {
    double total = 0.0, coeff = 1.0;
    for (int n = 0; n < 200; ++n) {
      if (n > 0) coeff *= c / n;
      const double term = coeff * std::pow(zz, q * n + 1.0) / (q * n + 1.0);
      total += term;
      if (n > 3 && term < 1e-18 * total) break;
    }
    return total;
  };
  return partial(z) / partial(1.0);
}

inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Fixed regret/offline instance: DR quadratic (d = 8) over the basis polytope
// of the rank-3 uniform matroid, sphere noise of radius 1.
inline ExperimentConfig regret_instance() {
  nlohmann::json j = {
      {"constraint", {{"family", "uniform_matroid"}, {"d", 8}, {"k", 3}, {"basis", false}}},
      {"objective", {{"type", "random_quadratic"}, {"d", 8}, {"seed", 7}}},
      {"theta", {{"kind", "constant_one"}}},
      {"gamma", 1.0},
      {"noise", {{"model", "bounded_sphere"}, {"radius", 1.0}}},
      {"T", 10000},
      {"checkpoints", {100, 1000, 10000}},
      {"comparator", {{"budget", 10000}, {"seed", 3}}}};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  j["seeds"] = seeds;
  return config_from_json(j);
}

inline CriterionResult coefficient_recovery() {
  return timed(1, "coefficient recovery", 1.0, [](Verdict& v) {
    const auto k = make_uniform_matroid(8, 3, false);
    const auto kstar = maximal_convex_subset(k);
    const double a1 = alpha_star(make_context(1.0, ThetaSpec::constant_one(), k), kstar);
    v.check(std::abs(a1 - (1.0 - std::exp(-1.0))) <= 1e-12,
            "theta=1: alpha=" + num(a1, 15));
    const double a2 =
        alpha_star(make_context(1.0, ThetaSpec::p_norm_power(1.0, 1.0), k), kstar);
    v.check(std::abs(a2 - (1.0 - std::exp(-0.5))) <= 1e-12,
            "basis p=1 sigma=1: alpha=" + num(a2, 15));
    const double a3 =
        alpha_star(make_context(1.0, ThetaSpec::p_norm_power(1.0, 2.0), k), kstar);
    v.check(std::abs(a3 - (1.0 - std::exp(-1.0 / 3.0))) <= 1e-12,
            "OSS sigma=1 (theta=|x|_1^2): alpha=" + num(a3, 15));
  });
}

inline std::vector<Objective> certified_objectives(std::size_t d) {
  std::vector<Objective> raw = {
      make_random_monotone_quadratic(d, 11), make_random_monotone_quadratic(d, 12, 0.5),
      make_norm_power(d, 2.0), make_norm_power(d, 1.5), make_linear(Vector(d, 1.0))};
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i].gradient(Vector(d, 0.5));
  std::vector<Objective> out;
  for (std::size_t i = 0; i < raw.size(); ++i)
    out.push_back(certify_p_sigma(raw[i], 1.0, 1.0, 10000, 100 + i));
  return out;
}

inline CriterionResult linearization_inequality() {
  return timed(2, "linearization inequality", 60.0, [](Verdict& v) {
    const std::size_t d = 8;
    const auto objectives = certified_objectives(d);
    const std::vector<ConstraintSet> ambients = {make_uniform_matroid(d, 3, false),
                                                 make_box(d)};
    Rng rng(2024);
    for (const auto& f : objectives) {
      const ThetaSpec theta = ThetaSpec::p_norm_power(1.0, f.tag().sigma);
      double worst_local = -HUGE_VAL, worst_global = -HUGE_VAL;
      for (const auto& k : ambients) {
        const auto kstar = maximal_convex_subset(k);
        const auto ctx = make_context(1.0, theta, k);
        const double alpha = alpha_star(ctx, kstar);
        for (int i = 0; i < 1000; ++i) {
          const Vector x = sample_point(kstar, rng), y = sample_point(kstar, rng);
          const double lhs = dot(surrogate_exact(ctx, f, x), sub(y, x));
          const double fx = f.value(x), fy = f.value(y);
          worst_local = std::max(worst_local, alpha_at(ctx, x) * fy - fx - lhs);
          worst_global = std::max(worst_global, alpha * fy - fx - lhs);
        }
      }
      v.check(worst_local <= 1e-6 && worst_global <= 1e-6,
              f.name() + "(sigma=" + num(f.tag().sigma, 4) + ") worst alpha_x excess " +
                  num(worst_local, 3) + ", worst alpha excess " + num(worst_global, 3));
    }
  });
}

inline CriterionResult estimator_correctness() {
  return timed(3, "estimator correctness", 60.0, [](Verdict& v) {
    const std::size_t d = 8;
    const auto box = make_box(d);
    const NoiseModel noise = NoiseModel::sphere(0.5);
    const std::vector<std::pair<Objective, ThetaSpec>> cases = {
        {make_random_monotone_quadratic(d, 31), ThetaSpec::constant_one()},
        {make_norm_power(d, 2.0), ThetaSpec::p_norm_power(1.0, 1.0)}};
    Rng pick(77);
    constexpr int kSamples = 200000;
    int inside = 0, total = 0;
    double worst_z = 0.0;
    bool bounded = true;
    for (int point = 0; point < 10; ++point) {
      const auto& [f, theta] = cases[point % 2];
      const auto ctx = make_context(1.0, theta, box);
      const Vector x = uniform_vector(d, pick);
      const Vector exact = surrogate_exact(ctx, f, x);
      QueryOracle oracle(f, OracleOrder::kFirst, noise, 1000 + point);
      Rng rng(2000 + point);
      Vector mean(d, 0.0), sq(d, 0.0);
      for (int s = 0; s < kSamples; ++s) {
        const SurrogateEstimate e = estimate_surrogate(ctx, oracle, x, rng);
        bounded = bounded && norm2(e.g) <= oracle.bound();
        for (std::size_t i = 0; i < d; ++i) {
          mean[i] += e.g[i];
          sq[i] += e.g[i] * e.g[i];
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        const double m = mean[i] / kSamples;
        const double var = (sq[i] / kSamples - m * m) * kSamples / (kSamples - 1.0);
        const double z = std::abs(m - exact[i]) / std::sqrt(var / kSamples);
        worst_z = std::max(worst_z, z);
        inside += z <= 3.0;
        ++total;
      }
    }
    v.check(inside == total, std::to_string(inside) + "/" + std::to_string(total) +
                                 " components within 3 stderr (worst " +
                                 num(worst_z, 3) + " stderr)");
    v.check(bounded, "all sample norms <= B1");
  });
}

inline CriterionResult sampler_distribution() {
  return timed(4, "sampler distribution", 30.0, [](Verdict& v) {
    const std::size_t d = 4;
    const auto box = make_box(d);
    double worst = 0.0;
    for (double sigma : {0.0, 1.0, 2.0}) {
      const auto ctx = make_context(1.0, ThetaSpec::p_norm_power(1.0, sigma), box);
      for (double l1 : {0.5, 2.0, 4.0}) {
        const Vector x(d, l1 / d);
        const ZDistribution dist(ctx, x);
        Rng rng(static_cast<std::uint64_t>(1000 * sigma + 10 * l1));
        std::vector<double> zs(100000);
        for (double& z : zs) z = dist.sample(rng);
        const double c = ctx.gamma * ctx.theta(x) / (ctx.R_theta * (sigma + 1.0));
        const double ks = ks_statistic(zs, [&](double z) { return series_cdf(c, sigma + 1.0, z); });
        worst = std::max(worst, ks);
        v.check(ks < 0.01, "sigma=" + num(sigma) + " |x|_1=" + num(l1) + " KS=" + num(ks, 3));
        if (sigma == 0.0 && l1 == 4.0) {
          const double expected = 1.0 + std::log((1.0 + std::exp(-1.0)) / 2.0);
          std::nth_element(zs.begin(), zs.begin() + zs.size() / 2, zs.end());
          v.check(std::abs(dist.quantile(0.5) - expected) <= 1e-3,
                  "sigma=0 median " + num(dist.quantile(0.5), 8) + " vs " +
                      num(expected, 8) + " (empirical " + num(zs[zs.size() / 2], 5) + ")");
        }
      }
    }
  });
}

inline CriterionResult regret_bound_check() {
  return timed(5, "regret bound", 300.0, [](Verdict& v) {
    const ExperimentConfig cfg = regret_instance();
    const PreparedRun prep = prepare_run(cfg);
    const OnlineProblem& p = prep.problem;
    const double expected_alpha = 1.0 - std::exp(-cfg.gamma / (cfg.theta.sigma() + 1.0));
    v.check(std::abs(p.alpha - expected_alpha) <= 1e-12, "alpha=" + num(p.alpha, 10));
    const ComparatorTable table =
        build_comparator_table(p, cfg.comparator_budget, cfg.comparator_seed);
    std::vector<double> mean(p.checkpoints.size(), 0.0), lin(p.checkpoints.size(), 0.0);
    std::vector<double> worst(p.checkpoints.size(), -1e300);
    bool feasible = true, queries = true;
    for (std::uint64_t seed : cfg.seeds) {
      const RegretTrace tr = run_online(p, table, seed);
      queries = queries && tr.queries == p.T;
      for (const auto& r : tr.rounds) feasible = feasible && p.kstar.contains(r.x);
      for (std::size_t i = 0; i < tr.checkpoints.size(); ++i) {
        mean[i] += tr.checkpoints[i].regret / cfg.seeds.size();
        lin[i] += tr.checkpoints[i].linear_regret / cfg.seeds.size();
        worst[i] = std::max(worst[i], tr.checkpoints[i].regret);
      }
    }
    for (std::size_t i = 0; i < p.checkpoints.size(); ++i) {
      const double bound = regret_bound(prep.grad_bound, p.kstar.diameter(), p.checkpoints[i]);
      v.check(worst[i] <= bound, "t=" + std::to_string(p.checkpoints[i]) +
                                     " max regret " + num(worst[i], 5) + " (mean " +
                                     num(mean[i], 5) + ") <= bound " + num(bound, 5));
    }
    const std::size_t m = p.checkpoints.size();
    const double slope = regret_slope(1000.0, mean[m - 2], 10000.0, mean[m - 1]);
    v.check(slope <= 0.55, "log-log slope of mean alpha-regret over [1e3,1e4] = " + num(slope, 4));
    // Negative alpha-regret makes its slope vacuous; the surrogate-payoff
    // regret of the base algorithm must show the sqrt(T) rate as well.
    const double lin_slope = regret_slope(1000.0, lin[m - 2], 10000.0, lin[m - 1]);
    v.check(lin_slope <= 0.55, "linear regret of OGA mean " + num(lin[m - 1], 5) +
                                   ", slope " + num(lin_slope, 4));
    v.check(feasible, "all iterates in K*");
    v.check(queries, "one oracle query per round");
  });
}

inline CriterionResult offline_guarantee() {
  return timed(6, "offline guarantee", 300.0, [](Verdict& v) {
    const ExperimentConfig cfg = regret_instance();
    const PreparedRun prep = prepare_run(cfg);
    const OnlineProblem& p = prep.problem;
    const ComparatorResult opt = find_comparator(p.kstar, cfg.objectives[0],
                                                 cfg.comparator_budget, cfg.comparator_seed);
    double mean = 0.0;
    for (std::uint64_t seed : cfg.seeds)
      mean += cfg.objectives[0].value(online_to_batch(p, cfg.T, seed)) / cfg.seeds.size();
    const double threshold = p.alpha * opt.value - 1.5 * prep.grad_bound * p.kstar.diameter() /
                                                       std::sqrt(static_cast<double>(cfg.T));
    v.check(mean >= threshold, "mean f(output)=" + num(mean, 8) + " >= alpha*OPT - 1.5 B1 D/sqrt(T) = " +
                                   num(threshold, 8) + " (OPT=" + num(opt.value, 8) + ", " +
                                   opt.method + ")");
  });
}

inline CriterionResult containments() {
  return timed(7, "class containments", 120.0, [](Verdict& v) {
    const std::size_t d = 4;
    const std::vector<Objective> raw = {make_norm_power(d, 2.0), make_norm_power(d, 3.0),
                                        make_random_monotone_quadratic(d, 5)};
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const Objective up = certify_p_sigma(raw[i], 1.0, 1.0, 10000, 40 + i);
      const double sigma = up.tag().sigma;
      const double zero = check_up_concave(up, 1.0, ThetaSpec::p_norm_power(1.0, sigma), 10000, 40 + i)
                              .max_violation();
      const double oss = check_oss(up, sigma, 10000, 50 + i).max_violation();
      v.check(zero <= kCertifyTol && oss <= 1e-4,
              raw[i].name() + " certified (1,1," + num(sigma, 4) + "): OSS violation " + num(oss, 3));

      const Objective os = certify_oss(raw[i], 10000, 60 + i);
      const double s2 = os.tag().sigma;
      const double up2 = check_up_concave(os, 1.0, ThetaSpec::p_norm_power(1.0, 2.0 * s2), 10000, 70 + i)
                             .max_violation();
      const double lyap = check_ray_lyapunov(os, s2, 100, 50, 80 + i);
      v.check(up2 <= 1e-6, raw[i].name() + " certified " + num(s2, 4) +
                               "-OSS: (1,1,2 sigma) violation " + num(up2, 3));
      v.check(lyap <= 1e-6, raw[i].name() + " ray quantity max increase " + num(lyap, 3));
    }
  });
}

inline CriterionResult matroid_geometry() {
  return timed(8, "matroid geometry", 30.0, [](Verdict& v) {
    std::vector<ConstraintSet> sets;
    for (std::size_t d : {3, 8})
      for (std::size_t k : {1, 3}) sets.push_back(make_uniform_matroid(d, k, false));
    sets.push_back(make_partition_matroid({{0, 1, 2}, {3, 4, 5}}, {1, 2}, false));
    Rng rng(8);
    for (const auto& k : sets) {
      const auto kstar = maximal_convex_subset(k);
      const double rho = k.rank();
      int agree = 0;
      double worst_norm = 0.0;
      for (int i = 0; i < 10000; ++i) {
        Vector x;
        switch (i % 4) {
          case 0: x = uniform_vector(k.dim(), rng); break;
          case 1: x = sample_point(k, rng); break;
          case 2: x = sample_point(kstar, rng); break;
          default: {
            x = sample_point(kstar, rng);
            x[i % k.dim()] += (uniform01(rng) - 0.5) * 1e-6;
          }
        }
        const bool direct = k.contains(x) && std::abs(norm1(x) - rho) <= kMembershipTol;
        agree += direct == kstar.contains(x);
        Vector y = uniform_vector(k.dim(), rng);
        for (double& t : y) t *= 2.0;
        worst_norm = std::max(worst_norm, std::abs(norm1(project(kstar, y)) - rho));
      }
      const auto rb = radial_bounds(k, ThetaSpec::p_norm_power(1.0, 1.0));
      double vmin = 1e300, vmax = 0.0;
      for_each_vertex(kstar, [&](const Vector& u) { vmin = std::min(vmin, norm1(u)); });
      for_each_vertex(k, [&](const Vector& u) { vmax = std::max(vmax, norm1(u)); });
      const std::string name = std::string(family_name(k.family())) + "(d=" +
                               std::to_string(k.dim()) + ",rho=" + num(rho) + ")";
      v.check(agree == 10000 && rb.r_theta == rho && rb.R_theta == rho && vmin == rho &&
                  vmax == rho && worst_norm <= 1e-9,
              name + ": " + std::to_string(agree) + "/10000 agree, r1=" + num(rb.r_theta) +
                  " R1=" + num(rb.R_theta) + ", max | |P(y)|_1 - rho | " + num(worst_norm, 3));
    }
  });
}

}  // namespace acceptance

inline const std::vector<std::string>& acceptance_suites() {
  static const std::vector<std::string> names = {"geometry", "classes",  "linearization",
                                                 "sampler",  "regret",   "offline"};
  return names;
}

/// Runs a named criterion set ("all" runs every suite).
inline std::vector<CriterionResult> run_acceptance(const std::string& suite) {
  using namespace acceptance;
  std::vector<CriterionResult> out;
  const bool all = suite == "all";
  bool known = all;
  auto want = [&](const char* name) {
    const bool hit = all || suite == name;
    known = known || hit;
    return hit;
  };
  if (want("linearization")) {
    out.push_back(coefficient_recovery());
    out.push_back(linearization_inequality());
    out.push_back(estimator_correctness());
  }
  if (want("sampler")) out.push_back(sampler_distribution());
  if (want("regret")) out.push_back(regret_bound_check());
  if (want("offline")) out.push_back(offline_guarantee());
  if (want("classes")) out.push_back(containments());
  if (want("geometry")) out.push_back(matroid_geometry());
  if (!known) {
    std::string valid = "all";
    for (const auto& s : acceptance_suites()) valid += ", " + s;
    throw std::invalid_argument("unknown acceptance suite \"" + suite + "\"; valid: " + valid);
  }
  std::sort(out.begin(), out.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return out;
}

}  // namespace uplin
