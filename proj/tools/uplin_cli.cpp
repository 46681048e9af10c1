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


#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uplin/uplin.hpp"

namespace {

int cmd_run(const std::string& config, const std::vector<std::uint64_t>& seeds,
            const std::string& out) {
  uplin::ExperimentConfig c = uplin::load_config(config);
  if (!seeds.empty()) c.seeds = seeds;
  if (!out.empty()) c.output_dir = out;
  const uplin::ExperimentSummary s = uplin::run_experiment(c);
  std::cout << s.json.dump(2) << '\n'
            << (s.passed ? "PASS" : "FAIL") << " -> " << s.output_dir.string() << '\n';
  return s.passed ? 0 : 1;
}

int cmd_accept(const std::string& suite) {
  const auto results = uplin::run_acceptance(suite);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << uplin::format_line(r) << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "ALL PASS" : "SOME CRITERIA FAILED") << '\n';
  return ok ? 0 : 1;
}

int cmd_opt(const std::string& config, std::size_t budget, std::uint64_t seed) {
  const uplin::ExperimentConfig c = uplin::load_config(config);
  const auto kstar = uplin::maximal_convex_subset(c.constraint);
  // A sequence is optimized through its average, the per-round comparator target.
  const uplin::Objective f =
      c.objectives.size() == 1
          ? c.objectives.front()
          : uplin::make_weighted_sum(
                c.objectives, std::vector<double>(c.objectives.size(),
                                                  1.0 / static_cast<double>(c.objectives.size())));
  const uplin::ComparatorResult r = uplin::find_comparator(kstar, f, budget, seed);
  const nlohmann::json j = {{"point", r.point},     {"value", r.value},
                            {"method", r.method},   {"probes", r.probes},
                            {"fw_gap", r.gap},      {"budget", budget},
                            {"feasible", kstar.contains(r.point)}};
  std::cout << j.dump(2) << '\n';
  return kstar.contains(r.point) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upper-linearization toolkit: online/offline maximization experiments"};
  app.require_subcommand(1);

  std::string config, out, suite;
  std::vector<std::uint64_t> seeds;
  std::size_t budget = 10000;
  std::uint64_t opt_seed = 0;

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config, "Config path")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
  run->add_option("--out", out, std::string("Output directory (default $") +
                                    uplin::kOutDirEnv + " or ./uplin_out)");

  auto* accept = app.add_subcommand("accept", "Run an acceptance suite");
  accept->add_option("--suite", suite, "all, geometry, classes, linearization, sampler, regret, offline")
      ->required();

  auto* opt = app.add_subcommand("opt", "Approximate max of the objective over K*");
  opt->add_option("--config", config, "Config path")->required()->check(CLI::ExistingFile);
  opt->add_option("--budget", budget, "Objective evaluation budget")->required();
  opt->add_option("--seed", opt_seed, "Multistart seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, seeds, out);
    if (*accept) return cmd_accept(suite);
    if (*opt) return cmd_opt(config, budget, opt_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
