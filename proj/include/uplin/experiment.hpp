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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uplin/comparator.hpp"
#include "uplin/domains.hpp"
#include "uplin/linearization.hpp"
#include "uplin/objectives.hpp"
#include "uplin/online.hpp"
#include "uplin/oracles.hpp"
#include "uplin/svg.hpp"
#include "uplin/theta.hpp"

namespace uplin {

inline constexpr const char* kOutDirEnv = "UPLIN_OUT_DIR";

// {"kind": "constant_one"} | {"kind": "p_norm_power", "p": p, "sigma": s}
inline ThetaSpec theta_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", std::string("constant_one"));
  if (kind == "constant_one") return ThetaSpec::constant_one();
  if (kind == "p_norm_power")
    return ThetaSpec::p_norm_power(j.value("p", 1.0), j.value("sigma", 0.0));
  throw std::invalid_argument("theta config: unknown kind \"" + kind + "\"");
}

inline nlohmann::json to_json(const ThetaSpec& t) {
  if (t.kind() == ThetaSpec::Kind::kPNormPower)
    return {{"kind", "p_norm_power"}, {"p", t.p()}, {"sigma", t.sigma()}};
  return {{"kind", t.name()}};
}

enum class RunMode { kOnline, kOffline };

struct ExperimentConfig {
  nlohmann::json raw;
  ConstraintSet constraint = make_box(1);  // ambient K; runs happen on K*
  std::vector<Objective> objectives;
  ThetaSpec theta = ThetaSpec::constant_one();
  double gamma = 1.0;
  NoiseModel noise;
  std::size_t T = 1;
  std::vector<std::uint64_t> seeds;
  std::vector<std::size_t> checkpoints;
  RunMode mode = RunMode::kOnline;
  std::string output_dir;
  std::size_t comparator_budget = 10000;
  std::uint64_t comparator_seed = 0;
};

/// Parses and validates a run configuration. Checkpoints default to the
/// powers of ten up to T; T itself is always a checkpoint.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: expected a JSON object");
  ExperimentConfig c;
  c.raw = j;
  require(j.contains("constraint"), "config: missing \"constraint\"");
  c.constraint = constraint_from_json(j.at("constraint"));
  if (j.contains("objectives")) {
    for (const auto& o : j.at("objectives")) c.objectives.push_back(objective_from_json(o));
  } else {
    require(j.contains("objective"), "config: missing \"objective\"");
    c.objectives.push_back(objective_from_json(j.at("objective")));
  }
  require(!c.objectives.empty(), "config: empty objective list");
  for (const auto& f : c.objectives)
    require(f.dim() == c.constraint.dim(),
            "config: objective dimension differs from the constraint set");
  if (j.contains("theta")) c.theta = theta_from_json(j.at("theta"));
  c.gamma = j.value("gamma", 1.0);
  require(c.gamma > 0.0 && c.gamma <= 1.0, "config: gamma must lie in (0,1]");
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  const long long T = j.value("T", 1000LL);
  require(T >= 1, "config: T must be >= 1");
  c.T = static_cast<std::size_t>(T);
  c.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
  require(!c.seeds.empty(), "config: seeds must be nonempty");
  if (j.contains("checkpoints")) {
    c.checkpoints = j.at("checkpoints").get<std::vector<std::size_t>>();
  } else {
    for (std::size_t t = 10; t < c.T; t *= 10) c.checkpoints.push_back(t);
  }
  if (c.checkpoints.empty() || c.checkpoints.back() != c.T) c.checkpoints.push_back(c.T);
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    require(c.checkpoints[i] >= 1 && c.checkpoints[i] <= c.T,
            "config: checkpoint outside [1, T]");
    require(i == 0 || c.checkpoints[i] > c.checkpoints[i - 1],
            "config: checkpoints must increase");
  }
  const std::string mode = j.value("mode", std::string("online"));
  require(mode == "online" || mode == "offline",
          "config: mode must be \"online\" or \"offline\"");
  c.mode = mode == "online" ? RunMode::kOnline : RunMode::kOffline;
  require(c.mode == RunMode::kOnline || c.objectives.size() == 1,
          "config: offline mode needs a single objective");
  c.output_dir = j.value("output_dir", std::string());
  if (j.contains("comparator")) {
    c.comparator_budget = j.at("comparator").value("budget", std::size_t{10000});
    c.comparator_seed = j.at("comparator").value("seed", std::uint64_t{0});
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  return config_from_json(nlohmann::json::parse(in));
}

/// Output directory: explicit value, else $UPLIN_OUT_DIR, else "uplin_out".
inline std::filesystem::path resolve_output_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "uplin_out";
}

/// Everything derived from a config before any seed runs.
struct PreparedRun {
  ConstraintSet kstar = make_box(1);
  OnlineProblem problem;
  double grad_bound = 0.0;  // B1 of the first-order oracles
};

inline PreparedRun prepare_run(const ExperimentConfig& c) {
  PreparedRun r;
  r.kstar = maximal_convex_subset(c.constraint);
  r.problem.kstar = r.kstar;
  r.problem.ctx = make_context(c.gamma, c.theta, c.constraint);
  r.problem.objectives = c.objectives;
  r.problem.noise = c.noise;
  r.problem.T = c.T;
  r.problem.checkpoints = c.checkpoints;
  r.problem.alpha = alpha_star(r.problem.ctx, r.kstar);
  for (const auto& f : c.objectives)
    r.grad_bound = std::max(
        r.grad_bound, QueryOracle(f, OracleOrder::kFirst, c.noise, 0).bound());
  return r;
}

/// Log-log slope of a regret curve between two horizons, on its positive
/// part: -inf when the later value is <= 0 (no growth), +inf when only the
/// earlier one is.
inline double regret_slope(double t_lo, double r_lo, double t_hi, double r_hi) {
  if (!(r_hi > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(r_lo > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(r_hi / r_lo) / std::log(t_hi / t_lo);
}

// JSON has no infinities; they are written as the strings "inf" / "-inf".
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

struct ExperimentSummary {
  nlohmann::json json;
  bool passed = false;
  std::filesystem::path output_dir;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.imbue(std::locale::classic());
  out.precision(17);
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Runs every seed (concurrently, one state/oracle/rng per seed) and writes
/// regret.csv, summary.json and regret.svg (online) or offline.csv and
/// summary.json (offline) into the output directory.
inline ExperimentSummary run_experiment(const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  ExperimentSummary out;
  out.output_dir = resolve_output_dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(out.output_dir, ec);
  if (ec || !fs::is_directory(out.output_dir))
    throw std::runtime_error("cannot create output directory " +
                             out.output_dir.string() + ": " + ec.message());

  const PreparedRun prep = prepare_run(c);
  const OnlineProblem& p = prep.problem;
  const std::size_t d = p.kstar.dim();
  const double D = p.kstar.diameter();

  nlohmann::json& s = out.json;
  s["config"] = c.raw;
  s["constraint"] = to_json(c.constraint);
  s["maximal_subset"] = to_json(p.kstar);
  s["theta"] = to_json(c.theta);
  s["gamma"] = c.gamma;
  s["R_theta"] = p.ctx.R_theta;
  s["alpha"] = p.alpha;
  s["B1"] = prep.grad_bound;
  s["D"] = D;
  s["T"] = c.T;
  s["seeds"] = c.seeds;

  if (c.mode == RunMode::kOffline) {
    const ComparatorResult opt =
        find_comparator(p.kstar, c.objectives[0], c.comparator_budget, c.comparator_seed);
    std::vector<std::future<Vector>> jobs;
    for (std::uint64_t seed : c.seeds)
      jobs.push_back(std::async(std::launch::async,
                                [&p, &c, seed] { return online_to_batch(p, c.T, seed); }));
    std::vector<double> values;
    auto csv = detail::open_output(out.output_dir / "offline.csv");
    csv << "seed";
    for (std::size_t i = 0; i < d; ++i) csv << ",x" << i;
    csv << ",f\n";
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      const Vector x = jobs[k].get();
      values.push_back(c.objectives[0].value(x));
      csv << c.seeds[k];
      for (double v : x) csv << ',' << v;
      csv << ',' << values.back() << '\n';
    }
    const double mean = detail::mean_of(values);
    const double threshold =
        p.alpha * opt.value - 1.5 * prep.grad_bound * D / std::sqrt(static_cast<double>(c.T));
    s["mode"] = "offline";
    s["OPT"] = opt.value;
    s["comparator"] = {{"method", opt.method}, {"probes", opt.probes},
                       {"gap", opt.gap}, {"point", opt.point}};
    s["mean_value"] = mean;
    s["std_value"] = detail::std_of(values);
    s["threshold"] = threshold;
    out.passed = mean >= threshold;
    s["pass"] = {{"offline_guarantee", out.passed}};
  } else {
    const ComparatorTable table =
        build_comparator_table(p, c.comparator_budget, c.comparator_seed);
    std::vector<std::future<RegretTrace>> jobs;
    for (std::uint64_t seed : c.seeds)
      jobs.push_back(std::async(std::launch::async,
                                [&p, &table, seed] { return run_online(p, table, seed); }));
    std::vector<RegretTrace> traces;
    for (auto& j : jobs) traces.push_back(j.get());

    auto csv = detail::open_output(out.output_dir / "regret.csv");
    csv << "seed,t";
    for (std::size_t i = 0; i < d; ++i) csv << ",x" << i;
    csv << ",f,cum_regret\n";
    bool feasible = true;
    for (std::size_t k = 0; k < traces.size(); ++k) {
      for (const auto& r : traces[k].rounds) {
        feasible = feasible && p.kstar.contains(r.x);
        csv << c.seeds[k] << ',' << r.t;
        for (double v : r.x) csv << ',' << v;
        csv << ',' << r.value << ',' << r.cum_regret << '\n';
      }
    }

    nlohmann::json cps = nlohmann::json::array();
    bool within = true;
    std::vector<double> mean_regret, mean_linear;
    for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
      std::vector<double> reg, lin;
      for (const auto& tr : traces) {
        reg.push_back(tr.checkpoints[i].regret);
        lin.push_back(tr.checkpoints[i].linear_regret);
      }
      const double bound = regret_bound(prep.grad_bound, D, c.checkpoints[i]);
      const double mx = *std::max_element(reg.begin(), reg.end());
      mean_regret.push_back(detail::mean_of(reg));
      mean_linear.push_back(detail::mean_of(lin));
      const bool ok = mx <= bound;
      within = within && ok;
      cps.push_back({{"t", c.checkpoints[i]},
                     {"mean_regret", mean_regret.back()},
                     {"std_regret", detail::std_of(reg)},
                     {"max_regret", mx},
                     {"mean_linear_regret", mean_linear.back()},
                     {"bound", bound},
                     {"envelope_ratio", mean_regret.back() / bound},
                     {"within_bound", ok}});
    }
    s["mode"] = "online";
    s["OPT_total"] = table.prefix_best.back();
    s["OPT"] = table.prefix_best.back() / static_cast<double>(c.T);
    s["comparator_point"] = table.point;
    s["checkpoints"] = cps;
    s["queries_per_seed"] = traces.front().queries;
    double slope = std::numeric_limits<double>::quiet_NaN();
    const std::size_t m = c.checkpoints.size();
    if (m >= 2 && c.checkpoints[m - 2] * 10 == c.checkpoints[m - 1]) {
      slope = regret_slope(static_cast<double>(c.checkpoints[m - 2]), mean_regret[m - 2],
                           static_cast<double>(c.checkpoints[m - 1]), mean_regret[m - 1]);
      s["loglog_slope_last_decade"] = json_number(slope);
      s["linear_regret_slope_last_decade"] = json_number(
          regret_slope(static_cast<double>(c.checkpoints[m - 2]), mean_linear[m - 2],
                       static_cast<double>(c.checkpoints[m - 1]), mean_linear[m - 1]));
    }
    out.passed = within && feasible;
    s["pass"] = {{"within_bound", within}, {"feasible", feasible}};

    // Mean cumulative regret against the fixed comparator, thinned for plotting.
    PlotSeries mean_series{"mean alpha-regret", {}, {}, "#1f77b4", false};
    PlotSeries envelope{"(3/2) B1 D sqrt(t)", {}, {}, "#d62728", true};
    const std::size_t stride = std::max<std::size_t>(1, c.T / 400);
    for (std::size_t t = 1; t <= c.T; t = (t == 1 && stride > 1) ? stride : t + stride) {
      double acc = 0.0;
      for (const auto& tr : traces) acc += tr.rounds[t - 1].cum_regret;
      mean_series.xs.push_back(static_cast<double>(t));
      mean_series.ys.push_back(acc / static_cast<double>(traces.size()));
      envelope.xs.push_back(static_cast<double>(t));
      envelope.ys.push_back(regret_bound(prep.grad_bound, D, t));
    }
    auto svg = detail::open_output(out.output_dir / "regret.svg");
    svg << render_line_plot({mean_series, envelope}, "OMBQ(OGA) alpha-regret", "t",
                            "alpha-regret");
  }

  auto js = detail::open_output(out.output_dir / "summary.json");
  js << s.dump(2) << '\n';
  return out;
}

}  // namespace uplin
