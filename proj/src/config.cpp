#include "fracplap/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fracplap {

namespace {

using Entries = std::map<std::string, std::vector<std::string>>;

double to_real(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not a number: '" + text + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "not an integer: '" + text + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(Entries entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const std::vector<std::string>& raw(const std::string& key) {
    used_.insert(key);
    const auto& v = entries_.at(key);
    if (v.empty()) throw ConfigError(key, "empty value");
    return v;
  }

  std::string scalar(const std::string& key) {
    const auto& v = raw(key);
    if (v.size() != 1) throw ConfigError(key, "expected a single value");
    return v[0];
  }

  // Expressions may contain spaces, which the tokenizer splits on.
  std::string text(const std::string& key) {
    const auto& v = raw(key);
    std::string out;
    for (const auto& part : v) {
      if (!out.empty()) out += ' ';
      out += part;
    }
    return out;
  }

  void real(const std::string& key, double& out) {
    if (has(key)) out = to_real(key, scalar(key));
  }

  void integer(const std::string& key, int& out) {
    if (has(key)) out = static_cast<int>(to_integer(key, scalar(key)));
  }

  void reals(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    out.clear();
    for (const auto& s : raw(key)) out.push_back(to_real(key, s));
  }

  void check_unused() const {
    for (const auto& [key, value] : entries_) {
      if (!used_.count(key)) throw ConfigError(key, "unknown key");
    }
  }

 private:
  Entries entries_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  Entries entries;
  for (auto& item : CLI::ConfigTOML().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;
    if (item.parents.size() != 1) {
      throw ConfigError(item.fullname(), "keys must sit inside one [section]");
    }
    std::vector<std::string> values;
    for (auto& v : item.inputs) {
      if (!v.empty()) values.push_back(std::move(v));
    }
    entries[item.fullname()] = std::move(values);
  }

  Reader r(std::move(entries));
  RunConfig c;

  r.integer("domain.dimension", c.dimension);
  require(c.dimension == 1 || c.dimension == 2, "domain.dimension", "must be 1 or 2");
  r.reals("domain.lower", c.lower);
  r.reals("domain.upper", c.upper);
  require(c.lower.size() >= static_cast<std::size_t>(c.dimension), "domain.lower",
          "needs one entry per dimension");
  require(c.upper.size() >= static_cast<std::size_t>(c.dimension), "domain.upper",
          "needs one entry per dimension");

  require(r.has("mesh.resolution"), "mesh.resolution", "missing required key");
  for (const auto& s : r.raw("mesh.resolution")) {
    c.resolution.push_back(static_cast<int>(to_integer("mesh.resolution", s)));
  }
  if (c.resolution.size() == 1 && c.dimension == 2) c.resolution.push_back(c.resolution[0]);
  require(c.resolution.size() == static_cast<std::size_t>(c.dimension), "mesh.resolution",
          "needs one entry per dimension");

  require(r.has("problem.s"), "problem.s", "missing required key 's'");
  r.real("problem.s", c.s);
  require(r.has("problem.p_expr"), "problem.p_expr", "missing required key 'p_expr'");
  c.p_expr = r.text("problem.p_expr");
  if (r.has("problem.q_expr")) c.q_expr = r.text("problem.q_expr");
  if (r.has("problem.f_expr")) c.f_expr = r.text("problem.f_expr");
  if (r.has("problem.f_spike")) {
    std::vector<double> point;
    r.reals("problem.f_spike", point);
    require(point.size() == static_cast<std::size_t>(c.dimension), "problem.f_spike",
            "needs one coordinate per dimension");
    c.f_spike = std::move(point);
  }
  r.real("problem.spike_mass", c.spike_mass);
  require(c.f_expr.has_value() != c.f_spike.has_value(), "problem.f_expr",
          "exactly one of 'f_expr' and 'f_spike' is required");
  require(c.spike_mass >= 0.0, "problem.spike_mass", "must be nonnegative");

  r.real("quadrature.rel_tol", c.rel_tol);
  require(c.rel_tol > 0.0, "quadrature.rel_tol", "must be positive");

  r.real("solver.tol", c.tol);
  require(c.tol > 0.0, "solver.tol", "must be positive");
  r.integer("solver.max_iters", c.max_iters);
  require(c.max_iters >= 0, "solver.max_iters", "must be nonnegative");
  r.real("solver.smoothing_eps0", c.smoothing_eps0);

  r.reals("sweep.levels", c.levels);

  r.reals("diagnostics.k_fractions", c.k_fractions);
  r.reals("diagnostics.h_fractions", c.h_fractions);
  r.reals("diagnostics.sigma_fractions", c.sigma_fractions);
  r.reals("diagnostics.level_fractions", c.level_fractions);
  const std::pair<const char*, const std::vector<double>*> fraction_lists[] = {
      {"diagnostics.k_fractions", &c.k_fractions},
      {"diagnostics.h_fractions", &c.h_fractions},
      {"diagnostics.sigma_fractions", &c.sigma_fractions},
      {"diagnostics.level_fractions", &c.level_fractions}};
  for (const auto& [key, list] : fraction_lists) {
    require(!list->empty(), key, "must not be empty");
    for (double v : *list) require(v > 0.0, key, "entries must be positive");
  }
  if (r.has("diagnostics.r_expr")) c.r_expr = r.text("diagnostics.r_expr");
  r.integer("diagnostics.bumps", c.bumps);
  require(c.bumps >= 1, "diagnostics.bumps", "must be positive");
  r.integer("diagnostics.restart_seeds", c.restart_seeds);
  require(c.restart_seeds >= 2, "diagnostics.restart_seeds", "must be at least 2");

  if (r.has("output.directory")) c.output_dir = r.text("output.directory");
  if (r.has("output.seed")) {
    const long long seed = to_integer("output.seed", r.scalar("output.seed"));
    require(seed >= 0, "output.seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
  }

  r.check_unused();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in);
}

}  // namespace fracplap
