#include "fracplap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracplap/function_spaces.hpp"
#include "fracplap/truncation.hpp"

namespace fracplap {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Error bound for naive summation of `terms` values of total magnitude `magnitude`.
double roundoff(std::size_t terms, double magnitude) {
  return static_cast<double>(terms) * kEps * magnitude;
}

double flux(double d, double p) {
  if (d == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(d), p - 1.0), d);
}

struct Residual {
  Problem problem;  // data at the solution's level
  std::vector<double> gradient;
  double l1 = 0.0;
};

Residual residual_of(const Solution& sol, const Problem& problem) {
  require_same_mesh(*problem.kernel, sol.u);
  Residual r{problem.truncated(sol.level), {}, 0.0};
  r.gradient = energy_gradient(r.problem, sol.u).values();
  const auto& pinned = problem.pinned();
  for (std::size_t i = 0; i < r.gradient.size(); ++i) {
    if (!pinned[i]) r.l1 += std::abs(r.gradient[i]);
  }
  return r;
}

std::array<int, 2> grid_of(const Kernel& kernel) {
  const auto res = kernel.resolution();
  if (res[0] == 0) return {static_cast<int>(kernel.size()), 1};
  return res;
}

double level_context(const Solution& sol) {
  return std::isinf(sol.level) ? -1.0 : sol.level;
}

}  // namespace

CheckReport CheckReport::make(std::string name, double lhs, double rhs, double slack,
                              std::map<std::string, double> context) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack_allowance = slack;
  r.passed = lhs <= rhs + slack;
  r.context = std::move(context);
  return r;
}

double residual_l1(const Solution& sol, const Problem& problem) {
  return residual_of(sol, problem).l1;
}

CheckReport truncation_energy_check(const Solution& sol, const Problem& problem, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation_energy_check: k must be positive");
  const Residual res = residual_of(sol, problem);
  const Kernel& kernel = *problem.kernel;
  const std::size_t n = kernel.size();
  const auto& m = kernel.masses();
  const auto& f = res.problem.f;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = truncate(k, sol.u[i]);

  double lhs = 0.0;
  double pairing = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = kernel.weight_row(i);
    const auto p = kernel.exponent_row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || w[j] == 0.0) continue;
      const double dt = t[i] - t[j];
      if (dt == 0.0) continue;
      lhs += w[j] * std::pow(std::abs(dt), p[j]);
      pairing += w[j] * std::abs(flux(sol.u[i] - sol.u[j], p[j]) * dt);
    }
  }
  double data = 0.0;
  double load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    data += m[i] * f[i];
    load += m[i] * f[i] * std::abs(t[i]);
  }
  const double rhs = k * data;
  const double residual_slack = k * res.l1;
  const double ro = roundoff(n * n, lhs + pairing + load + rhs + residual_slack);
  return CheckReport::make("truncation_energy", lhs, rhs, residual_slack + ro,
                           {{"k", k},
                            {"level", level_context(sol)},
                            {"residual_slack", residual_slack},
                            {"roundoff", ro}});
}

CheckReport rh_tail_check(const Solution& sol, const Problem& problem, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("rh_tail_check: h must be positive");
  const Residual res = residual_of(sol, problem);
  const Kernel& kernel = *problem.kernel;
  const std::size_t n = kernel.size();
  const auto& m = kernel.masses();
  const auto& u = sol.u;

  double lhs = 0.0;
  double pairing = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = kernel.weight_row(i);
    const auto p = kernel.exponent_row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || w[j] == 0.0) continue;
      const double d = std::abs(u[i] - u[j]);
      if (d == 0.0) continue;
      const double term = w[j] * std::pow(d, p[j] - 1.0);
      pairing += term;
      if (in_Rh(h, u[i], u[j])) lhs += term;
    }
  }
  double rhs = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += m[i] * res.problem.f[i];
    if (u[i] > h) rhs += m[i] * res.problem.f[i];
  }
  const double ro = roundoff(n * n, pairing + total + res.l1);
  return CheckReport::make("rh_tail", lhs, rhs, res.l1 + ro,
                           {{"h", h},
                            {"level", level_context(sol)},
                            {"residual_slack", res.l1},
                            {"roundoff", ro}});
}

LevelSetSeries level_set_decay(const Solution& sol, const Kernel& kernel,
                               std::span<const double> ks) {
  require_same_mesh(kernel, sol.u);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0) || (i > 0 && !(ks[i] > ks[i - 1]))) {
      throw std::invalid_argument("level_set_decay: ks must be positive and increasing");
    }
  }
  LevelSetSeries out;
  out.ks.assign(ks.begin(), ks.end());
  const auto& m = kernel.masses();
  for (double k : ks) {
    double measure = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (sol.u[i] >= k) measure += m[i];
    }
    out.measures.push_back(measure);
  }

  std::vector<double> xs, ys;
  for (std::size_t i = ks.size() / 2; i < ks.size(); ++i) {
    if (out.measures[i] > 0.0) {
      xs.push_back(std::log(ks[i]));
      ys.push_back(std::log(out.measures[i]));
    }
  }
  if (xs.size() < 2) {
    out.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double nx = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / nx;
    my += ys[i] / nx;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  out.slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  return out;
}

CheckReport level_set_bound_check(const Solution& sol, const Problem& problem,
                                  const ExponentField& field, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("level_set_bound_check: k must be positive");
  const Kernel& kernel = *problem.kernel;
  if (!kernel.has_coordinates()) {
    throw std::invalid_argument("level_set_bound_check: kernel carries no node coordinates");
  }
  const Residual res = residual_of(sol, problem);
  const std::size_t n = kernel.size();
  const auto& m = kernel.masses();

  const double k_array[] = {k};
  const double measure = level_set_decay(sol, kernel, k_array).measures[0];

  std::vector<double> pbar(n);
  for (std::size_t i = 0; i < n; ++i) pbar[i] = field.p_diagonal(kernel.node(i));
  const double q_lo = *std::min_element(pbar.begin(), pbar.end());
  const double q_hi = *std::max_element(pbar.begin(), pbar.end());

  double data = 0.0;
  for (std::size_t i = 0; i < n; ++i) data += m[i] * res.problem.f[i];

  const DiscreteFunction tk = truncate(k, sol.u);
  double ratio = 0.0;
  if (seminorm_modular(kernel, sol.u) > 0.0) {
    ratio = std::max(embedding_ratio(sol.u, kernel, field, pbar),
                     embedding_ratio(tk, kernel, field, pbar));
  }

  // rho(T_k u) <= k * total  =>  [T_k u] <= max((k total)^{1/p-}, (k total)^{1/p+})
  const auto bound = [&](double total) {
    const double kf = k * total;
    const double seminorm =
        std::max(std::pow(kf, 1.0 / kernel.p_minus()), std::pow(kf, 1.0 / kernel.p_plus()));
    const double a = ratio * seminorm / k;
    return 2.0 * std::max(std::pow(a, q_lo), std::pow(a, q_hi));
  };
  const double rhs = bound(data);
  const double with_residual = bound(data + res.l1);
  const double residual_slack = with_residual - rhs;
  const double ro = roundoff(n, measure);
  return CheckReport::make(
      "level_set_bound", measure, rhs, residual_slack + ro,
      {{"k", k},
       {"level", level_context(sol)},
       {"embedding_ratio", ratio},
       {"constant", 0.5 * rhs * std::pow(k, kernel.p_minus() - 1.0)},
       {"residual_slack", residual_slack},
       {"roundoff", ro}});
}

std::vector<bool> collar_nodes(const Kernel& kernel) {
  const auto [nx, ny] = grid_of(kernel);
  const auto& boundary = kernel.boundary();
  std::vector<bool> collar(kernel.size(), false);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      bool hit = false;
      for (int dy = -1; dy <= 1 && !hit; ++dy) {
        for (int dx = -1; dx <= 1 && !hit; ++dx) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
          hit = boundary[static_cast<std::size_t>(jx + nx * jy)];
        }
      }
      collar[static_cast<std::size_t>(ix + nx * iy)] = hit;
    }
  }
  return collar;
}

std::vector<DiscreteFunction> bump_functions(const Kernel& kernel, int count) {
  if (count < 1) throw std::invalid_argument("bump count must be positive");
  const auto [nx, ny] = grid_of(kernel);
  const bool two_d = kernel.dimension() == 2 && ny > 1;
  const auto collar = collar_nodes(kernel);

  const auto support_clear = [&](int cx, int cy) {
    for (int dy = two_d ? -1 : 0; dy <= (two_d ? 1 : 0); ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int jx = cx + dx, jy = cy + dy;
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) return false;
        if (collar[static_cast<std::size_t>(jx + nx * jy)]) return false;
      }
    }
    return true;
  };
  std::vector<std::array<int, 2>> centres;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (support_clear(ix, iy)) centres.push_back({ix, iy});
    }
  }
  if (centres.size() < static_cast<std::size_t>(count)) {
    throw std::invalid_argument("mesh too coarse for " + std::to_string(count) + " bumps");
  }

  const auto tent = [](int d) { return d == 0 ? 1.0 : (std::abs(d) == 1 ? 0.5 : 0.0); };
  std::vector<DiscreteFunction> out;
  for (int b = 0; b < count; ++b) {
    const std::size_t pick = static_cast<std::size_t>(
        std::floor((b + 0.5) * static_cast<double>(centres.size()) / count));
    const auto [cx, cy] = centres[pick];
    std::vector<double> v(kernel.size(), 0.0);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const double ty = two_d ? tent(iy - cy) : 1.0;
        v[static_cast<std::size_t>(ix + nx * iy)] = tent(ix - cx) * ty;
      }
    }
    out.push_back(DiscreteFunction::on(kernel, std::move(v), true));
  }
  return out;
}

namespace {

struct RenormalizedTerms {
  double value;
  double magnitude;
  double sup_test;
};

RenormalizedTerms renormalized_terms(const Solution& sol, const Residual& res, double sigma,
                                     const DiscreteFunction& phi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("renormalized_residual: sigma must be positive");
  const Kernel& kernel = *res.problem.kernel;
  require_same_mesh(kernel, phi);
  const auto collar = collar_nodes(kernel);
  const std::size_t n = kernel.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (collar[i] && phi[i] != 0.0) {
      throw UnsupportedTestFunction("test function is nonzero at node " + std::to_string(i) +
                                    " in the boundary collar");
    }
  }
  std::vector<double> psi(n);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    psi[i] = smooth_cutoff(sigma, sol.u[i]).value * phi[i];
    sup = std::max(sup, std::abs(psi[i]));
  }
  const auto& m = kernel.masses();
  double pair_sum = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = kernel.weight_row(i);
    const auto p = kernel.exponent_row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || w[j] == 0.0) continue;
      const double term = w[j] * flux(sol.u[i] - sol.u[j], p[j]) * (psi[i] - psi[j]);
      pair_sum += term;
      magnitude += std::abs(term);
    }
  }
  double load = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    load += m[i] * res.problem.f[i] * psi[i];
    magnitude += std::abs(m[i] * res.problem.f[i] * psi[i]);
  }
  return {std::abs(pair_sum - load), magnitude, sup};
}

}  // namespace

double renormalized_residual(const Solution& sol, const Problem& problem, double sigma,
                             const DiscreteFunction& phi) {
  const Residual res = residual_of(sol, problem);
  return renormalized_terms(sol, res, sigma, phi).value;
}

CheckReport renormalized_check(const Solution& sol, const Problem& problem, double sigma,
                               const DiscreteFunction& phi) {
  const Residual res = residual_of(sol, problem);
  const auto t = renormalized_terms(sol, res, sigma, phi);
  const double residual_slack = t.sup_test * res.l1;
  const std::size_t n = problem.kernel->size();
  const double ro = roundoff(n * n, t.magnitude + residual_slack);
  return CheckReport::make("renormalized_residual", t.value, 0.0, residual_slack + ro,
                           {{"sigma", sigma},
                            {"level", level_context(sol)},
                            {"test_sup", t.sup_test},
                            {"residual_slack", residual_slack},
                            {"roundoff", ro}});
}

DiscrepancyReport uniqueness_discrepancy(const Solution& u, const Solution& v,
                                         const Problem& problem, double k, double sigma) {
  if (!(k > 0.0) || !(sigma >= k)) {
    throw std::invalid_argument("uniqueness_discrepancy needs sigma >= k > 0");
  }
  if (u.level != v.level) {
    throw std::invalid_argument("uniqueness_discrepancy: solutions solve different data");
  }
  const Residual ru = residual_of(u, problem);
  const Residual rv = residual_of(v, problem);
  const Kernel& kernel = *problem.kernel;
  const std::size_t n = kernel.size();
  const auto& m = kernel.masses();
  const auto& f = ru.problem.f;

  std::vector<double> a(n), b(n), phi(n);
  std::vector<bool> inside(n);
  double phi_sup = 0.0;
  DiscrepancyReport out;
  out.k = k;
  out.sigma = sigma;
  for (std::size_t i = 0; i < n; ++i) {
    const auto su = smooth_cutoff(sigma, u.u[i]);
    const auto sv = smooth_cutoff(sigma, v.u[i]);
    a[i] = su.derivative;
    b[i] = sv.derivative;
    phi[i] = truncate(k, su.value - sv.value);
    phi_sup = std::max(phi_sup, std::abs(phi[i]));
    inside[i] = std::abs(u.u[i]) <= k && std::abs(v.u[i]) <= k && std::abs(u.u[i] - v.u[i]) <= k;
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(u.u[i] - v.u[i]));
  }

  double magnitude = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto w = kernel.weight_row(i);
    const auto p = kernel.exponent_row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || w[j] == 0.0) continue;
      const double U = flux(u.u[i] - u.u[j], p[j]);
      const double V = flux(v.u[i] - v.u[j], p[j]);
      const double dphi = phi[i] - phi[j];
      const double t1 = w[j] * (0.5 * (a[i] + a[j]) * U - 0.5 * (b[i] + b[j]) * V) * dphi;
      const double t2 = w[j] * (U * (a[i] - a[j]) - V * (b[i] - b[j])) * 0.5 * (phi[i] + phi[j]);
      out.J1 += t1;
      out.J2 += t2;
      magnitude += std::abs(t1) + std::abs(t2);
      if (inside[i] && inside[j]) {
        out.J1_1 += w[j] * (U - V) * ((u.u[i] - v.u[i]) - (u.u[j] - v.u[j]));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t3 = m[i] * f[i] * (a[i] - b[i]) * phi[i];
    out.J3 += t3;
    magnitude += std::abs(t3);
  }
  out.identity_gap = std::abs(out.J1 + out.J2 - out.J3);
  out.pairing_bound = (phi_sup + 1.0) * (ru.l1 + rv.l1);
  out.roundoff = roundoff(2 * n * n, magnitude);
  return out;
}

CheckReport uniqueness_identity_check(const DiscrepancyReport& r) {
  return CheckReport::make("uniqueness_identity", r.identity_gap, 0.0,
                           r.pairing_bound + r.roundoff,
                           {{"k", r.k},
                            {"sigma", r.sigma},
                            {"J1", r.J1},
                            {"J2", r.J2},
                            {"J3", r.J3},
                            {"residual_slack", r.pairing_bound},
                            {"roundoff", r.roundoff}});
}

CheckReport uniqueness_monotone_check(const DiscrepancyReport& r) {
  return CheckReport::make("uniqueness_monotone", -r.J1_1, 0.0, 1e-12,
                           {{"k", r.k}, {"sigma", r.sigma}, {"J1_1", r.J1_1}});
}

CheckReport restart_gap_check(const DiscrepancyReport& r, double tol) {
  return CheckReport::make("restart_gap", r.max_abs_diff, 0.0, 10.0 * tol, {{"tol", tol}});
}

std::vector<ConvergencePoint> truncation_convergence(const std::vector<Solution>& seq,
                                                     const Kernel& kernel, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation_convergence: k must be positive");
  std::vector<ConvergencePoint> out;
  if (seq.empty()) return out;
  const DiscreteFunction last = truncate(k, seq.back().u);
  const Modular seminorm = Modular::seminorm(kernel);
  for (const auto& sol : seq) {
    require_same_mesh(kernel, sol.u);
    const DiscreteFunction tk = truncate(k, sol.u);
    std::vector<double> diff(tk.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = tk[i] - last[i];
    const auto gap = luxemburg_norm(seminorm, DiscreteFunction::on(kernel, std::move(diff)));
    out.push_back({sol.level, gap.value});
  }
  return out;
}

double embedding_ratio(const DiscreteFunction& u, const Kernel& kernel, const ExponentField& field,
                       const Expression& r) {
  return embedding_ratio(u, kernel, field, exponent_at_nodes(kernel, r));
}

double embedding_ratio(const DiscreteFunction& u, const Kernel& kernel, const ExponentField& field,
                       std::span<const double> r_at_nodes) {
  require_same_mesh(kernel, u);
  if (!kernel.has_coordinates()) {
    throw std::invalid_argument("embedding_ratio: kernel carries no node coordinates");
  }
  if (r_at_nodes.size() != kernel.size()) {
    throw std::invalid_argument("embedding_ratio: r must have one entry per node");
  }
  if (seminorm_modular(kernel, u) == 0.0) throw ZeroSeminorm("seminorm of u is zero");
  if (!u.boundary_zero()) throw std::invalid_argument("embedding_ratio: u must vanish on the boundary");

  const double dim = kernel.dimension();
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const double pbar = field.p_diagonal(kernel.node(i));
    const double upper = dim * pbar / (dim - field.s * pbar);
    const double r = r_at_nodes[i];
    if (!(r > 1.0) || !(r < upper)) {
      throw ExponentRangeViolation("r = " + std::to_string(r) + " at node " + std::to_string(i) +
                                   " is outside (1, " + std::to_string(upper) + ")");
    }
  }
  const auto lebesgue = Modular::lebesgue(kernel, {r_at_nodes.begin(), r_at_nodes.end()});
  const double top = luxemburg_norm(lebesgue, u).value;
  const double bottom = luxemburg_norm(Modular::seminorm(kernel), u).value;
  return top / bottom;
}

}  // namespace fracplap
