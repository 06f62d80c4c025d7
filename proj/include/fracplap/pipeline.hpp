#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracplap/config.hpp"
#include "fracplap/diagnostics.hpp"
#include "fracplap/exponent_field.hpp"
#include "fracplap/kernel.hpp"
#include "fracplap/mesh.hpp"
#include "fracplap/solver.hpp"

namespace fracplap {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitKernel = 4,
  kExitMonotonicity = 5,
  kExitCheckFailed = 6,
};

struct PipelineOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Mesh, validated exponent field, kernel and data built from a config.
struct Setup {
  RunConfig config;
  Mesh mesh;
  ExponentField field;
  std::shared_ptr<const Kernel> kernel;
  Problem problem;
};

/// Throws ConfigError for anything attributable to a config key and lets
/// kernel assembly errors propagate.
Setup build_setup(const RunConfig& config);

/// Nodal data from f_expr or f_spike; ConfigError if negative.
std::vector<double> build_data(const RunConfig& config, const Mesh& mesh);

nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const DiscrepancyReport& report);
nlohmann::json to_json(const Solution& sol);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Solve then run every configured diagnostic; returns the document written
/// to checks.json and sets all_passed.
nlohmann::json run_checks(const Setup& setup, const Solution& sol, bool& all_passed);

int run_solve(const std::filesystem::path& config_path, const PipelineOptions& opts);
int run_sweep(const std::filesystem::path& config_path, const PipelineOptions& opts);
int run_check(const std::filesystem::path& config_path, const PipelineOptions& opts);
/// Prints the Luxemburg seminorm, Lebesgue (q) norm and full norm of
/// `function` sampled at the nodes as one JSON object on `out`.
int run_norms(const std::filesystem::path& config_path, const std::string& function,
              const PipelineOptions& opts, std::ostream& out);

}  // namespace fracplap
