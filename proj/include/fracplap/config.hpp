#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracplap/errors.hpp"

namespace fracplap {

/// Bad or missing configuration entry; key() is the offending "section.key".
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  // [domain]
  int dimension = 1;
  std::vector<double> lower{0.0, 0.0};
  std::vector<double> upper{1.0, 1.0};
  // [mesh]
  std::vector<int> resolution;
  // [problem]
  double s = 0.0;
  std::string p_expr;
  std::optional<std::string> q_expr;
  std::optional<std::string> f_expr;
  /// Point whose nearest node carries all of the data mass.
  std::optional<std::vector<double>> f_spike;
  double spike_mass = 1.0;
  // [quadrature]
  double rel_tol = 1e-6;
  // [solver]
  double tol = 1e-8;
  int max_iters = 20000;
  double smoothing_eps0 = -1.0;
  // [sweep]
  std::vector<double> levels;
  // [diagnostics]; fractions are relative to max u of the solution
  std::vector<double> k_fractions{0.1, 0.5, 1.0, 2.0};
  std::vector<double> h_fractions{0.25, 0.5, 0.75, 0.9};
  std::vector<double> sigma_fractions{0.5, 1.0, 2.0};
  std::vector<double> level_fractions{0.1, 0.25, 0.5, 1.0};
  std::optional<std::string> r_expr;
  int bumps = 5;
  int restart_seeds = 2;
  // [output]
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

/// Parses `[section]` headers and `key = value` lines (# or ; comments).
/// Lists are comma separated. Throws ConfigError naming the key for unknown
/// keys, unparsable values and missing required keys (mesh.resolution,
/// problem.s, problem.p_expr, and one of problem.f_expr / problem.f_spike).
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace fracplap
