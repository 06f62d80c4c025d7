#include "fracplap/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

#include "fracplap/errors.hpp"
#include "fracplap/quadrature.hpp"

namespace fracplap {

namespace {

void check_connected(const std::vector<double>& w, std::size_t n) {
  if (n == 0) return;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && w[i * n + j] > 0.0) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  if (reached != n) {
    throw DisconnectedKernel("kernel graph is disconnected: " + std::to_string(reached) + " of " +
                             std::to_string(n) + " nodes reachable from node 0");
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void Kernel::finalize() {
  const std::size_t n = size();
  p_minus_ = std::numeric_limits<double>::infinity();
  p_plus_ = -p_minus_;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p_minus_ = std::min(p_minus_, exponent(i, j));
      p_plus_ = std::max(p_plus_, exponent(i, j));
    }
  }
  if (n < 2) p_minus_ = p_plus_ = 2.0;
  check_connected(weights_, n);
}

Kernel Kernel::from_matrices(std::vector<double> weights, std::vector<double> exponents,
                             std::vector<double> masses, std::vector<bool> boundary,
                             std::optional<double> order, int dimension) {
  const std::size_t n = masses.size();
  if (weights.size() != n * n || exponents.size() != n * n || boundary.size() != n) {
    throw std::invalid_argument("kernel matrices must be n x n with n = masses.size()");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) {
      throw std::invalid_argument("node masses must be positive and finite");
    }
    if (weights[i * n + i] != 0.0) throw std::invalid_argument("kernel diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights[i * n + j];
      const double p = exponents[i * n + j];
      if (!std::isfinite(w) || w < 0.0) {
        throw std::invalid_argument("kernel weights must be finite and nonnegative");
      }
      if (w != weights[j * n + i] || p != exponents[j * n + i]) {
        throw std::invalid_argument("kernel weights and exponents must be symmetric");
      }
      if (i != j && !(p > 1.0 && std::isfinite(p))) {
        throw std::invalid_argument("kernel exponents must be finite and > 1");
      }
    }
  }
  Kernel k;
  k.mesh_id_ = next_mesh_id();
  k.dimension_ = dimension;
  k.order_ = order;
  k.weights_ = std::move(weights);
  k.exponents_ = std::move(exponents);
  k.masses_ = std::move(masses);
  k.boundary_ = std::move(boundary);
  k.finalize();
  return k;
}

Kernel assemble_kernel(const Mesh& mesh, const ExponentField& field, double rel_tol) {
  if (mesh.size() == 0) throw std::invalid_argument("mesh is empty");
  if (mesh.dimension() != field.dimension) {
    throw std::invalid_argument("mesh and exponent field dimensions differ");
  }
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");

  const std::size_t n = mesh.size();
  const int dim = mesh.dimension();
  const double s = field.s;
  const auto res = mesh.resolution();
  const Domain& dom = mesh.domain();
  const std::array<double, 2> h{(dom.upper[0] - dom.lower[0]) / res[0],
                                dim == 2 ? (dom.upper[1] - dom.lower[1]) / res[1] : 0.0};

  Kernel k;
  k.mesh_id_ = mesh.id();
  k.dimension_ = dim;
  k.order_ = s;
  k.weights_.assign(n * n, 0.0);
  k.exponents_.assign(n * n, 0.0);
  k.accuracy_.assign(n * n, 0.0);
  k.masses_ = mesh.masses();
  k.boundary_ = mesh.boundary();
  k.resolution_ = res;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = mesh.node(i);
    k.nodes_.push_back({x[0], dim == 2 ? x[1] : 0.0});
  }

  // On a uniform mesh w_ij depends only on |offset| per axis and p_ij.
  using Key = std::tuple<int, int, std::uint64_t>;
  std::map<Key, std::size_t> job_of;
  std::vector<Key> jobs;
  std::vector<std::size_t> pair_job(n * n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    k.exponents_[i * n + i] = field.p_diagonal(mesh.node(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = 0.5 * (field.p_at(mesh.node(i), mesh.node(j)) +
                              field.p_at(mesh.node(j), mesh.node(i)));
      if (!(p > 1.0)) {
        throw ExponentOutOfRange("p_ij = " + std::to_string(p) + " is not > 1 at nodes " +
                                 std::to_string(i) + ", " + std::to_string(j));
      }
      if (s * p >= dim) {
        throw OrderTooLarge("s*p_ij = " + std::to_string(s * p) + " >= N at nodes " +
                            std::to_string(i) + ", " + std::to_string(j));
      }
      k.exponents_[i * n + j] = p;
      k.exponents_[j * n + i] = p;
      const auto a = mesh.index_of(i);
      const auto b = mesh.index_of(j);
      const Key key{std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::bit_cast<std::uint64_t>(p)};
      auto [it, inserted] = job_of.emplace(key, jobs.size());
      if (inserted) jobs.push_back(key);
      pair_job[i * n + j] = it->second;
    }
  }

  // Jobs sharing an exponent share one memoized integrator; each group runs
  // on one thread and writes its own result slots.
  std::map<std::uint64_t, std::vector<std::size_t>> group_of;
  for (std::size_t q = 0; q < jobs.size(); ++q) group_of[std::get<2>(jobs[q])].push_back(q);
  std::vector<const std::vector<std::size_t>*> groups;
  for (const auto& [pbits, members] : group_of) groups.push_back(&members);

  std::vector<PairIntegral> results(jobs.size());
  const unsigned threads = std::max(
      1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                             static_cast<unsigned>(groups.size())));
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t g = t; g < groups.size(); g += threads) {
            const double p = std::bit_cast<double>(std::get<2>(jobs[groups[g]->front()]));
            CellPairIntegrator integrate(dim, h, dim + s * p, rel_tol);
            for (std::size_t q : *groups[g]) {
              const auto [dx, dy, pbits] = jobs[q];
              results[q] = integrate({dx, dy});
            }
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const PairIntegral& r = results[pair_job[i * n + j]];
      k.weights_[i * n + j] = k.weights_[j * n + i] = r.value;
      k.accuracy_[i * n + j] = k.accuracy_[j * n + i] = r.rel_error;
    }
  }
  k.finalize();
  return k;
}

void write_kernel(std::ostream& out, const Kernel& kernel) {
  const std::size_t n = kernel.size();
  out << "fracplap-kernel v1 N=" << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out << i << ' ' << j << ' ' << fmt17(kernel.weight(i, j)) << ' '
          << fmt17(kernel.exponent(i, j)) << '\n';
    }
  }
  out << "masses\n";
  for (double m : kernel.masses()) out << fmt17(m) << '\n';
}

Kernel read_kernel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw KernelFormatError("empty kernel file");
  std::size_t n = 0;
  {
    const std::string prefix = "fracplap-kernel v1 N=";
    if (line.rfind(prefix, 0) != 0) throw KernelFormatError("bad kernel header: " + line);
    try {
      n = std::stoul(line.substr(prefix.size()));
    } catch (const std::exception&) {
      throw KernelFormatError("bad node count in header: " + line);
    }
  }
  std::vector<double> w(n * n, 0.0);
  std::vector<double> p(n * n, 2.0);
  std::vector<bool> have(n * n, false);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line == "masses") break;
    std::istringstream row(line);
    std::size_t i = 0;
    std::size_t j = 0;
    double wij = 0.0;
    double pij = 0.0;
    if (!(row >> i >> j >> wij >> pij) || i >= j || j >= n) {
      throw KernelFormatError("bad kernel row: " + line);
    }
    if (have[i * n + j]) throw KernelFormatError("duplicate kernel row: " + line);
    have[i * n + j] = true;
    w[i * n + j] = w[j * n + i] = wij;
    p[i * n + j] = p[j * n + i] = pij;
    ++rows;
  }
  if (line != "masses") throw KernelFormatError("missing masses block");
  if (rows != n * (n - 1) / 2) throw KernelFormatError("kernel rows incomplete");
  std::vector<double> masses;
  while (masses.size() < n && std::getline(in, line)) {
    std::istringstream row(line);
    double m = 0.0;
    if (!(row >> m)) throw KernelFormatError("bad mass row: " + line);
    masses.push_back(m);
  }
  if (masses.size() != n) throw KernelFormatError("masses block incomplete");
  try {
    return Kernel::from_matrices(std::move(w), std::move(p), std::move(masses),
                                 std::vector<bool>(n, false));
  } catch (const std::invalid_argument& e) {
    throw KernelFormatError(e.what());
  }
}

}  // namespace fracplap
