#include "fracplap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "fracplap/function_spaces.hpp"

namespace fracplap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Domain domain_of(const RunConfig& c) {
  if (c.dimension == 1) return Domain::interval(c.lower[0], c.upper[0]);
  return Domain::rectangle(c.lower[0], c.upper[0], c.lower[1], c.upper[1]);
}

std::array<int, 2> resolution_of(const RunConfig& c) {
  return {c.resolution[0], c.dimension == 2 ? c.resolution[1] : 1};
}

ExponentField field_of(const RunConfig& c, const Domain& domain) {
  // Parse separately first so syntax problems name their own key.
  try {
    parse_expression(c.p_expr, c.dimension, VariableRole::pairwise);
  } catch (const Error& e) {
    throw ConfigError("problem.p_expr", e.what());
  }
  if (c.q_expr) {
    try {
      parse_expression(*c.q_expr, c.dimension, VariableRole::pointwise);
    } catch (const Error& e) {
      throw ConfigError("problem.q_expr", e.what());
    }
  }
  try {
    return build_exponent_field(c.p_expr, c.q_expr ? std::optional<std::string_view>(*c.q_expr)
                                                   : std::nullopt,
                                c.s, domain);
  } catch (const OrderTooLarge& e) {
    throw ConfigError("problem.s", e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem.s", e.what());
  } catch (const Error& e) {
    const std::string what = e.what();
    const bool about_q = c.q_expr && what.rfind("q", 0) == 0;
    throw ConfigError(about_q ? "problem.q_expr" : "problem.p_expr", what);
  }
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Context {
  RunConfig config;
  fs::path out_dir;
  bool quiet;

  void log(const std::string& msg) const {
    if (!quiet) std::cerr << "fracplap: " << msg << '\n';
  }
};

Context load(const fs::path& config_path, const PipelineOptions& opts) {
  Context ctx{load_config(config_path), {}, opts.quiet};
  if (opts.output_dir) ctx.config.output_dir = *opts.output_dir;
  if (opts.seed) ctx.config.seed = *opts.seed;
  ctx.out_dir = ctx.config.output_dir;
  fs::create_directories(ctx.out_dir);
  return ctx;
}

// Runs `body` and maps library exceptions onto exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "fracplap: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergentIntegral& e) {
    std::cerr << "fracplap: kernel assembly failed: " << e.what() << '\n';
    return kExitKernel;
  } catch (const BudgetExceeded& e) {
    std::cerr << "fracplap: kernel assembly failed: " << e.what() << '\n';
    return kExitKernel;
  } catch (const DisconnectedKernel& e) {
    std::cerr << "fracplap: kernel assembly failed: " << e.what() << '\n';
    return kExitKernel;
  } catch (const ExponentOutOfRange& e) {
    std::cerr << "fracplap: kernel assembly failed: " << e.what() << '\n';
    return kExitKernel;
  } catch (const OrderTooLarge& e) {
    std::cerr << "fracplap: kernel assembly failed: " << e.what() << '\n';
    return kExitKernel;
  } catch (const std::exception& e) {
    std::cerr << "fracplap: error: " << e.what() << '\n';
    return kExitOther;
  }
}

MinimizeOptions solver_options(const RunConfig& c) {
  MinimizeOptions o;
  o.tol = c.tol;
  o.max_iters = c.max_iters;
  o.smoothing_eps0 = c.smoothing_eps0;
  return o;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double solution_scale(const Solution& sol) {
  const double m = sol.u.max_abs();
  return m > 0.0 ? m : 1.0;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iters_exceeded:
      return "max_iters_exceeded";
    case SolveStatus::stalled:
      return "stalled";
  }
  return "unknown";
}

}  // namespace

std::vector<double> build_data(const RunConfig& c, const Mesh& mesh) {
  std::vector<double> f(mesh.size(), 0.0);
  if (c.f_expr) {
    Expression e;
    try {
      e = parse_expression(*c.f_expr, c.dimension, VariableRole::pointwise);
    } catch (const Error& err) {
      throw ConfigError("problem.f_expr", err.what());
    }
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      double v = 0.0;
      try {
        v = e.evaluate(point_assignment(mesh.node(i)));
      } catch (const Error& err) {
        throw ConfigError("problem.f_expr", err.what());
      }
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("problem.f_expr", "data must be finite and nonnegative, got " +
                                                format_real(v) + " at node " + std::to_string(i));
      }
      f[i] = v;
    }
    return f;
  }
  const auto& point = *c.f_spike;
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const auto x = mesh.node(i);
    double d = 0.0;
    for (int a = 0; a < c.dimension; ++a) d += (x[a] - point[a]) * (x[a] - point[a]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (mesh.boundary()[best]) {
    throw ConfigError("problem.f_spike", "nearest node is a boundary node");
  }
  f[best] = c.spike_mass / mesh.masses()[best];
  return f;
}

Setup build_setup(const RunConfig& config) {
  const Domain domain = domain_of(config);
  try {
    domain.validate();
  } catch (const std::exception& e) {
    throw ConfigError("domain.upper", e.what());
  }
  Mesh mesh;
  try {
    mesh = build_mesh(domain, resolution_of(config));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mesh.resolution", e.what());
  }
  ExponentField field = field_of(config, domain);
  auto f = build_data(config, mesh);
  auto kernel = std::make_shared<const Kernel>(assemble_kernel(mesh, field, config.rel_tol));
  Problem problem = Problem::make(kernel, std::move(f));
  return {config, std::move(mesh), std::move(field), std::move(kernel), std::move(problem)};
}

json to_json(const CheckReport& r) {
  json ctx = json::object();
  for (const auto& [k, v] : r.context) ctx[k] = v;
  return {{"name", r.name},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"slack_allowance", r.slack_allowance},
          {"passed", r.passed},
          {"context", ctx}};
}

json to_json(const DiscrepancyReport& r) {
  return {{"J1", r.J1},
          {"J2", r.J2},
          {"J3", r.J3},
          {"J1_1", r.J1_1},
          {"k", r.k},
          {"sigma", r.sigma},
          {"identity_gap", r.identity_gap},
          {"pairing_bound", r.pairing_bound},
          {"max_abs_diff", r.max_abs_diff},
          {"roundoff", r.roundoff}};
}

json to_json(const Solution& sol) {
  return {{"values", sol.u.values()},
          {"level", std::isinf(sol.level) ? json(nullptr) : json(sol.level)},
          {"weak_residual", sol.weak_residual},
          {"iterations", sol.iterations},
          {"energy", sol.energy_value},
          {"smoothing_final", sol.smoothing_final},
          {"status", status_name(sol.status)},
          {"converged", sol.converged()}};
}

void write_atomically(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json run_checks(const Setup& setup, const Solution& sol, bool& all_passed) {
  const RunConfig& c = setup.config;
  const Problem& problem = setup.problem;
  const Kernel& kernel = *setup.kernel;
  const double scale = solution_scale(sol);

  json checks = json::array();
  const auto add = [&](const CheckReport& r) { checks.push_back(to_json(r)); };

  for (double frac : c.k_fractions) add(truncation_energy_check(sol, problem, frac * scale));
  for (double frac : c.h_fractions) add(rh_tail_check(sol, problem, frac * scale));
  for (double frac : c.level_fractions) {
    add(level_set_bound_check(sol, problem, setup.field, frac * scale));
  }
  const auto bumps = bump_functions(kernel, c.bumps);
  for (double frac : c.sigma_fractions) {
    for (const auto& phi : bumps) add(renormalized_check(sol, problem, frac * scale, phi));
  }

  // Restarts from seeded random interior values.
  std::vector<Solution> restarts;
  for (int r = 0; r < c.restart_seeds; ++r) {
    std::mt19937_64 rng(c.seed + static_cast<std::uint64_t>(r));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> u0(kernel.size(), 0.0);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double v = unit(rng);
      if (!problem.pinned()[i]) u0[i] = v;
    }
    restarts.push_back(
        minimize(problem, DiscreteFunction::on(kernel, std::move(u0), true), solver_options(c)));
  }
  json discrepancies = json::array();
  bool restarts_converged = true;
  for (const auto& r : restarts) restarts_converged = restarts_converged && r.converged();
  for (std::size_t r = 1; r < restarts.size(); ++r) {
    const auto d = uniqueness_discrepancy(restarts[0], restarts[r], problem, scale, scale);
    discrepancies.push_back(to_json(d));
    add(uniqueness_identity_check(d));
    add(uniqueness_monotone_check(d));
    add(restart_gap_check(d, c.tol));
  }

  std::vector<double> ks;
  for (double frac : c.level_fractions) ks.push_back(frac * scale);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const auto series = level_set_decay(sol, kernel, ks);

  json embedding = nullptr;
  try {
    if (c.r_expr) {
      Expression r;
      try {
        r = parse_expression(*c.r_expr, c.dimension, VariableRole::pointwise);
      } catch (const Error& e) {
        throw ConfigError("diagnostics.r_expr", e.what());
      }
      embedding = embedding_ratio(sol.u, kernel, setup.field, r);
    } else {
      std::vector<double> pbar(kernel.size());
      for (std::size_t i = 0; i < pbar.size(); ++i) pbar[i] = setup.field.p_diagonal(kernel.node(i));
      embedding = embedding_ratio(sol.u, kernel, setup.field, pbar);
    }
  } catch (const ZeroSeminorm&) {
    embedding = nullptr;
  } catch (const ExponentRangeViolation& e) {
    throw ConfigError("diagnostics.r_expr", e.what());
  }

  all_passed = restarts_converged;
  for (const auto& r : checks) all_passed = all_passed && r.at("passed").get<bool>();

  return {{"checks", checks},
          {"uniqueness", discrepancies},
          {"restarts_converged", restarts_converged},
          {"level_set_decay",
           {{"ks", series.ks},
            {"measures", series.measures},
            {"slope", std::isnan(series.slope) ? json(nullptr) : json(series.slope)}}},
          {"embedding_ratio", embedding},
          {"solution",
           {{"max_u", sol.u.max_abs()},
            {"weak_residual", sol.weak_residual},
            {"iterations", sol.iterations},
            {"tol", c.tol}}},
          {"all_passed", all_passed}};
}

int run_solve(const fs::path& config_path, const PipelineOptions& opts) {
  return guarded([&] {
    const Context ctx = load(config_path, opts);
    ctx.log("assembling kernel");
    const Setup setup = build_setup(ctx.config);
    for (const auto& w : setup.field.warnings) ctx.log("warning: " + w);
    ctx.log("solving");
    const Solution sol = minimize(setup.problem, DiscreteFunction::zeros(*setup.kernel),
                                  solver_options(ctx.config));

    write_atomically(ctx.out_dir / "solution.json", to_json(sol).dump(2) + "\n");
    std::ostringstream kernel_text;
    write_kernel(kernel_text, *setup.kernel);
    write_atomically(ctx.out_dir / "kernel.txt", kernel_text.str());
    const ExponentField& fld = setup.field;
    json meta = {{"timestamp", iso_timestamp()},
                 {"config", config_path.string()},
                 {"seed", ctx.config.seed},
                 {"nodes", setup.kernel->size()},
                 {"field",
                  {{"s", fld.s},
                   {"dimension", fld.dimension},
                   {"p_minus", fld.p_minus},
                   {"p_plus", fld.p_plus},
                   {"q_minus", fld.q_minus},
                   {"q_plus", fld.q_plus},
                   {"sample_grid_resolution", fld.sample_grid_resolution},
                   {"symmetry_defect", fld.symmetry_defect}}},
                 {"kernel",
                  {{"p_minus", setup.kernel->p_minus()}, {"p_plus", setup.kernel->p_plus()}}},
                 {"warnings", fld.warnings}};
    write_atomically(ctx.out_dir / "meta.json", meta.dump(2) + "\n");

    if (!sol.converged()) {
      std::cerr << "fracplap: solver did not converge (" << status_name(sol.status)
                << ", residual " << sol.weak_residual << ")\n";
      return static_cast<int>(kExitNonConvergence);
    }
    ctx.log("done, residual " + format_real(sol.weak_residual));
    return static_cast<int>(kExitOk);
  });
}

int run_sweep(const fs::path& config_path, const PipelineOptions& opts) {
  return guarded([&] {
    const Context ctx = load(config_path, opts);
    const RunConfig& c = ctx.config;
    if (c.levels.size() < 2) throw ConfigError("sweep.levels", "needs at least 2 levels");
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      if (!(c.levels[i] > 0.0) || (i > 0 && !(c.levels[i] > c.levels[i - 1]))) {
        throw ConfigError("sweep.levels", "levels must be positive and strictly increasing");
      }
    }
    ctx.log("assembling kernel");
    const Setup setup = build_setup(c);
    ctx.log("solving " + std::to_string(c.levels.size()) + " levels");

    ApproxSequence seq;
    bool violated = false;
    try {
      seq = approx_sequence(setup.problem, c.levels, solver_options(c));
    } catch (const MonotonicityViolation& e) {
      std::cerr << "fracplap: " << e.what() << '\n';
      seq = e.partial();
      violated = true;
    }

    const double scale = solution_scale(seq.solutions.back());
    std::vector<std::vector<ConvergencePoint>> gaps;
    for (double frac : c.k_fractions) {
      gaps.push_back(truncation_convergence(seq.solutions, *setup.kernel, frac * scale));
    }
    std::ostringstream csv;
    csv << "level,energy,weak_residual,monotonicity_margin";
    for (double frac : c.k_fractions) csv << ",gap_k_" << format_real(frac * scale);
    csv << '\n';
    bool converged = true;
    for (std::size_t i = 0; i < seq.solutions.size(); ++i) {
      const auto& s = seq.solutions[i];
      converged = converged && s.converged();
      csv << format_real(s.level) << ',' << format_real(s.energy_value) << ','
          << format_real(s.weak_residual) << ',' << format_real(seq.monotonicity_margins[i]);
      for (const auto& g : gaps) csv << ',' << format_real(g[i].gap);
      csv << '\n';
    }
    write_atomically(ctx.out_dir / "sweep.csv", csv.str());
    if (violated) return static_cast<int>(kExitMonotonicity);
    if (!converged) {
      std::cerr << "fracplap: solver did not converge at every level\n";
      return static_cast<int>(kExitNonConvergence);
    }
    return static_cast<int>(kExitOk);
  });
}

int run_check(const fs::path& config_path, const PipelineOptions& opts) {
  return guarded([&] {
    const Context ctx = load(config_path, opts);
    ctx.log("assembling kernel");
    const Setup setup = build_setup(ctx.config);
    ctx.log("solving");
    const Solution sol = minimize(setup.problem, DiscreteFunction::zeros(*setup.kernel),
                                  solver_options(ctx.config));
    if (!sol.converged()) {
      std::cerr << "fracplap: solver did not converge (" << status_name(sol.status)
                << ", residual " << sol.weak_residual << ")\n";
      return static_cast<int>(kExitNonConvergence);
    }
    ctx.log("running checks");
    bool all_passed = false;
    const json doc = run_checks(setup, sol, all_passed);
    write_atomically(ctx.out_dir / "checks.json", doc.dump(2) + "\n");
    if (!all_passed) {
      for (const auto& r : doc.at("checks")) {
        if (!r.at("passed").get<bool>()) {
          std::cerr << "fracplap: check failed: " << r.at("name").get<std::string>() << '\n';
        }
      }
      if (!doc.at("restarts_converged").get<bool>()) {
        std::cerr << "fracplap: a restart did not converge\n";
      }
      return static_cast<int>(kExitCheckFailed);
    }
    ctx.log("all checks passed");
    return static_cast<int>(kExitOk);
  });
}

int run_norms(const fs::path& config_path, const std::string& function,
              const PipelineOptions& opts, std::ostream& out) {
  return guarded([&] {
    const Context ctx = load(config_path, opts);
    const Setup setup = build_setup(ctx.config);
    Expression e;
    try {
      e = parse_expression(function, ctx.config.dimension, VariableRole::pointwise);
    } catch (const Error& err) {
      throw ConfigError("--function", err.what());
    }
    const Kernel& kernel = *setup.kernel;
    std::vector<double> values(kernel.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = e.evaluate(point_assignment(kernel.node(i)));
    const auto u = DiscreteFunction::on(kernel, std::move(values));
    const auto q = q_at_nodes(kernel, setup.field);
    const json doc = {
        {"seminorm", luxemburg_norm(Modular::seminorm(kernel), u).value},
        {"lebesgue", luxemburg_norm(Modular::lebesgue(kernel, q), u).value},
        {"full", luxemburg_norm(Modular::full(kernel, q), u).value}};
    out << doc.dump() << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace fracplap
