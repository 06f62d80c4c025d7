#include "fracplap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fracplap/truncation.hpp"

namespace fracplap {

Problem Problem::make(std::shared_ptr<const Kernel> kernel, std::vector<double> f) {
  if (!kernel) throw std::invalid_argument("Problem: null kernel");
  for (double v : f) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("Problem: data must be finite and nonnegative");
    }
  }
  auto data = DiscreteFunction::on(*kernel, std::move(f));
  return {std::move(kernel), std::move(data)};
}

Problem Problem::truncated(double level) const {
  if (!(level > 0.0)) throw std::invalid_argument("truncation level must be positive");
  if (std::isinf(level)) return *this;
  return {kernel, truncate(level, f)};
}

namespace {

// Everything below works on the interior nodes only; boundary values stay 0.
struct Workspace {
  const Kernel& kernel;
  std::vector<std::size_t> interior;
  std::vector<double> load;  // m_i f_i
  std::size_t n;

  Workspace(const Problem& problem) : kernel(*problem.kernel), n(problem.kernel->size()) {
    const auto& pinned = problem.pinned();
    const auto& m = kernel.masses();
    load.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      load[i] = m[i] * problem.f[i];
      if (!pinned[i]) interior.push_back(i);
    }
  }
};

// (t^2 + eps^2)^{p/2} - eps^p, reducing to |t|^p when eps = 0.
double smoothed_power(double t, double p, double eps) {
  if (eps == 0.0) return t == 0.0 ? 0.0 : std::pow(std::abs(t), p);
  return std::pow(t * t + eps * eps, 0.5 * p) - std::pow(eps, p);
}

// derivative of smoothed_power divided by p: t (t^2 + eps^2)^{p/2 - 1}
double smoothed_flux(double t, double p, double eps) {
  if (t == 0.0) return 0.0;
  const double q = t * t + eps * eps;
  return t * std::pow(q, 0.5 * p - 1.0);
}

// smoothed_power(a) - smoothed_power(b) without cancellation when a ~ b.
double power_difference(double a, double b, double p, double eps) {
  const double qb = b * b + eps * eps;
  if (qb == 0.0) return smoothed_power(a, p, eps);
  const double ratio = (a - b) * (a + b) / qb;
  return std::pow(qb, 0.5 * p) * std::expm1(0.5 * p * std::log1p(ratio));
}

double energy_of(const Workspace& ws, const std::vector<double>& u, double eps) {
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < ws.n; ++i) {
    const auto w = ws.kernel.weight_row(i);
    const auto p = ws.kernel.exponent_row(i);
    double row = 0.0;
    for (std::size_t j = i + 1; j < ws.n; ++j) {
      if (w[j] == 0.0) continue;
      row += w[j] * smoothed_power(u[i] - u[j], p[j], eps) / p[j];
    }
    pair_sum += row;
  }
  double linear = 0.0;
  for (std::size_t i = 0; i < ws.n; ++i) linear += ws.load[i] * u[i];
  return 2.0 * pair_sum - linear;
}

void gradient_of(const Workspace& ws, const std::vector<double>& u, double eps,
                 std::vector<double>& g) {
  g.assign(ws.n, 0.0);
  for (std::size_t i = 0; i < ws.n; ++i) {
    const auto w = ws.kernel.weight_row(i);
    const auto p = ws.kernel.exponent_row(i);
    for (std::size_t j = i + 1; j < ws.n; ++j) {
      if (w[j] == 0.0) continue;
      const double flux = 2.0 * w[j] * smoothed_flux(u[i] - u[j], p[j], eps);
      g[i] += flux;
      g[j] -= flux;
    }
  }
  for (std::size_t i = 0; i < ws.n; ++i) g[i] -= ws.load[i];
}

// F(u + alpha d) - F(u), accumulated pairwise.
double energy_change(const Workspace& ws, const std::vector<double>& u,
                     const std::vector<double>& d, double alpha, double eps) {
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < ws.n; ++i) {
    const auto w = ws.kernel.weight_row(i);
    const auto p = ws.kernel.exponent_row(i);
    double row = 0.0;
    for (std::size_t j = i + 1; j < ws.n; ++j) {
      if (w[j] == 0.0) continue;
      const double t0 = u[i] - u[j];
      const double t1 = t0 + alpha * (d[i] - d[j]);
      if (t1 == t0) continue;
      row += w[j] * power_difference(t1, t0, p[j], eps) / p[j];
    }
    pair_sum += row;
  }
  double linear = 0.0;
  for (std::size_t i = 0; i < ws.n; ++i) linear += ws.load[i] * d[i];
  return 2.0 * pair_sum - alpha * linear;
}

double max_interior(const Workspace& ws, const std::vector<double>& g) {
  double r = 0.0;
  for (std::size_t i : ws.interior) r = std::max(r, std::abs(g[i]));
  return r;
}

double dot_interior(const Workspace& ws, const std::vector<double>& a,
                    const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i : ws.interior) s += a[i] * b[i];
  return s;
}

struct StageResult {
  int iterations = 0;
  bool reached = false;
  bool stalled = false;
};

// L-BFGS on the interior components with Armijo backtracking.
StageResult run_stage(const Workspace& ws, std::vector<double>& u, double eps, double target,
                      int budget, int memory, int first_iteration,
                      const std::function<void(const IterationRecord&)>& observer) {
  StageResult out;
  std::vector<double> g, g_new, d(ws.n, 0.0);
  gradient_of(ws, u, eps, g);
  double residual = max_interior(ws, g);
  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;
  std::deque<double> rho;
  std::vector<double> alpha_buf;

  while (true) {
    if (residual <= target) {
      out.reached = true;
      return out;
    }
    if (out.iterations >= budget) return out;

    // two-loop recursion
    std::vector<double> q(ws.n, 0.0);
    for (std::size_t i : ws.interior) q[i] = -g[i];
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha_buf[k] = rho[k] * dot_interior(ws, history[k].first, q);
      for (std::size_t i : ws.interior) q[i] -= alpha_buf[k] * history[k].second[i];
    }
    double step0 = 1.0;
    if (!history.empty()) {
      const auto& [s, y] = history.back();
      const double gamma = dot_interior(ws, s, y) / dot_interior(ws, y, y);
      for (std::size_t i : ws.interior) q[i] *= gamma;
    } else {
      step0 = 1.0 / std::max(1.0, residual);
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = rho[k] * dot_interior(ws, history[k].second, q);
      for (std::size_t i : ws.interior) q[i] += (alpha_buf[k] - beta) * history[k].first[i];
    }
    d = std::move(q);
    double slope = dot_interior(ws, g, d);
    if (!(slope < 0.0)) {
      history.clear();
      rho.clear();
      for (std::size_t i : ws.interior) d[i] = -g[i];
      slope = dot_interior(ws, g, d);
      step0 = 1.0 / std::max(1.0, residual);
    }

    double alpha = step0;
    double change = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      change = energy_change(ws, u, d, alpha, eps);
      if (change <= 1e-4 * alpha * slope && change < 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!history.empty()) {
        history.clear();
        rho.clear();
        continue;
      }
      out.stalled = true;
      return out;
    }

    std::vector<double> s(ws.n, 0.0);
    for (std::size_t i : ws.interior) {
      s[i] = alpha * d[i];
      u[i] += s[i];
    }
    gradient_of(ws, u, eps, g_new);
    std::vector<double> y(ws.n, 0.0);
    for (std::size_t i : ws.interior) y[i] = g_new[i] - g[i];
    const double sy = dot_interior(ws, s, y);
    if (sy > 1e-14 * std::sqrt(dot_interior(ws, s, s) * dot_interior(ws, y, y)) && sy > 0.0) {
      history.emplace_back(std::move(s), std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(history.size()) > memory) {
        history.pop_front();
        rho.pop_front();
      }
    }
    g.swap(g_new);
    residual = max_interior(ws, g);
    ++out.iterations;
    if (observer) {
      observer({first_iteration + out.iterations, eps, energy_of(ws, u, eps), change, residual});
    }
  }
}

}  // namespace

double energy(const Problem& problem, const DiscreteFunction& u) {
  require_same_mesh(*problem.kernel, u);
  Workspace ws(problem);
  return energy_of(ws, u.values(), 0.0);
}

DiscreteFunction energy_gradient(const Problem& problem, const DiscreteFunction& u) {
  require_same_mesh(*problem.kernel, u);
  Workspace ws(problem);
  std::vector<double> g;
  gradient_of(ws, u.values(), 0.0, g);
  return DiscreteFunction::on(*problem.kernel, std::move(g));
}

double interior_residual(const Problem& problem, const DiscreteFunction& gradient) {
  require_same_mesh(*problem.kernel, gradient);
  const auto& pinned = problem.pinned();
  double r = 0.0;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!pinned[i]) r = std::max(r, std::abs(gradient[i]));
  }
  return r;
}

double residual_target(const Problem& problem, double tol) {
  const auto& m = problem.kernel->masses();
  double scale = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) scale = std::max(scale, m[i] * problem.f[i]);
  return tol * (1.0 + scale);
}

Solution minimize(const Problem& problem, const DiscreteFunction& u0, const MinimizeOptions& opts) {
  require_same_mesh(*problem.kernel, u0);
  if (!(opts.tol > 0.0)) throw std::invalid_argument("minimize: tol must be positive");
  if (opts.max_iters < 0) throw std::invalid_argument("minimize: max_iters must be >= 0");
  Workspace ws(problem);

  std::vector<double> u(u0.values());
  for (std::size_t i = 0; i < ws.n; ++i) {
    if (problem.pinned()[i]) u[i] = 0.0;
  }
  const double target = residual_target(problem, opts.tol);
  const int memory = std::max(1, opts.memory);

  Solution sol;
  int used = 0;
  bool stalled = false;

  if (problem.kernel->p_minus() < 2.0) {
    double eps = opts.smoothing_eps0;
    if (!(eps > 0.0)) {
      double fmax = 0.0;
      for (double v : problem.f.values()) fmax = std::max(fmax, v);
      eps = 1e-2 * (fmax > 0.0 ? fmax : 1.0);
    }
    const double eps_floor = eps * 1e-6;
    while (eps >= eps_floor && used < opts.max_iters) {
      const double stage_target = std::max(target, eps);
      const auto r = run_stage(ws, u, eps, stage_target, opts.max_iters - used, memory, used,
                               opts.observer);
      used += r.iterations;
      sol.smoothing_final = eps;
      eps *= 0.25;
    }
  }

  const auto r = run_stage(ws, u, 0.0, target, opts.max_iters - used, memory, used, opts.observer);
  used += r.iterations;
  stalled = r.stalled;

  std::vector<double> g;
  gradient_of(ws, u, 0.0, g);
  sol.weak_residual = max_interior(ws, g);
  sol.iterations = used;
  sol.energy_value = energy_of(ws, u, 0.0);
  if (sol.weak_residual <= target) {
    sol.status = SolveStatus::converged;
  } else {
    sol.status = stalled ? SolveStatus::stalled : SolveStatus::max_iters_exceeded;
  }
  sol.u = DiscreteFunction::on(*problem.kernel, std::move(u), true);
  return sol;
}

ApproxSequence approx_sequence(const Problem& problem, std::span<const double> levels,
                               const MinimizeOptions& opts) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || (i > 0 && !(levels[i] > levels[i - 1]))) {
      throw std::invalid_argument("levels must be positive and strictly increasing");
    }
  }
  const double slack = 10.0 * opts.tol;
  ApproxSequence seq;
  DiscreteFunction start = DiscreteFunction::zeros(*problem.kernel);
  for (double level : levels) {
    Solution sol = minimize(problem.truncated(level), start, opts);
    sol.level = level;
    const auto& cur = sol.u.values();
    const std::vector<double>* prev = seq.solutions.empty() ? nullptr : &seq.solutions.back().u.values();
    double margin = std::numeric_limits<double>::infinity();
    double min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (problem.pinned()[i]) continue;
      margin = std::min(margin, cur[i] - (prev ? (*prev)[i] : 0.0));
      min_value = std::min(min_value, cur[i]);
    }
    start = sol.u;
    seq.solutions.push_back(std::move(sol));
    seq.monotonicity_margins.push_back(margin);
    if (min_value < -slack || margin < -slack) {
      std::ostringstream msg;
      msg << "approximate solutions lose monotonicity at level " << level << " (margin " << margin
          << ", min value " << min_value << ")";
      throw MonotonicityViolation(msg.str(), std::move(seq));
    }
  }
  return seq;
}

}  // namespace fracplap
