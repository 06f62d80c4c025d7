#include <CLI11.hpp>

#include <iostream>

#include "fracplap/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regional fractional p(x)-Laplacian solver and checker"};
  app.require_subcommand(1);

  std::string config;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string function;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output-dir", output_dir, "Override [output] directory");
    sub->add_option("--seed", seed, "Override [output] seed");
    sub->add_flag("--quiet", quiet, "Suppress progress messages");
  };
  auto* solve = app.add_subcommand("solve", "Assemble, solve, write solution/kernel/meta");
  auto* sweep = app.add_subcommand("sweep", "Solve the truncated data sequence, write sweep.csv");
  auto* check = app.add_subcommand("check", "Solve and run every diagnostic, write checks.json");
  auto* norms = app.add_subcommand("norms", "Print Luxemburg norms of a sampled function");
  for (auto* sub : {solve, sweep, check, norms}) common(sub);
  norms->add_option("--function", function, "Pointwise expression in x (x1, x2 in 2D)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fracplap::kExitConfig;
  }

  fracplap::PipelineOptions opts;
  opts.quiet = quiet;
  for (auto* sub : {solve, sweep, check, norms}) {
    if (sub->count("--output-dir")) opts.output_dir = output_dir;
    if (sub->count("--seed")) opts.seed = seed;
  }

  if (*solve) return fracplap::run_solve(config, opts);
  if (*sweep) return fracplap::run_sweep(config, opts);
  if (*check) return fracplap::run_check(config, opts);
  return fracplap::run_norms(config, function, opts, std::cout);
}
