#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fracplap/exponent_field.hpp"
#include "fracplap/mesh.hpp"

namespace fracplap {

/// Symmetric pairwise weights w_ij approximating dx dy / |x-y|^{N+s p(x,y)}
/// over cell pairs, with per-pair exponents p_ij.
///
/// Invariants: w_ij == w_ji and p_ij == p_ji bitwise, w_ij >= 0, w_ii == 0,
/// all entries finite, and the graph of positive weights is connected.
class Kernel {
 public:
  /// Validates the invariants; throws std::invalid_argument on malformed
  /// input and DisconnectedKernel when the weight graph is not connected.
  /// Matrices are row-major n x n.
  static Kernel from_matrices(std::vector<double> weights, std::vector<double> exponents,
                              std::vector<double> masses, std::vector<bool> boundary,
                              std::optional<double> order = std::nullopt, int dimension = 1);

  std::size_t size() const { return masses_.size(); }
  std::uint64_t mesh_id() const { return mesh_id_; }
  int dimension() const { return dimension_; }
  std::optional<double> order() const { return order_; }

  double weight(std::size_t i, std::size_t j) const { return weights_[i * size() + j]; }
  double exponent(std::size_t i, std::size_t j) const { return exponents_[i * size() + j]; }
  /// Estimated relative quadrature error of w_ij (0 for imported kernels).
  double accuracy(std::size_t i, std::size_t j) const {
    return accuracy_.empty() ? 0.0 : accuracy_[i * size() + j];
  }
  std::span<const double> weight_row(std::size_t i) const {
    return {weights_.data() + i * size(), size()};
  }
  std::span<const double> exponent_row(std::size_t i) const {
    return {exponents_.data() + i * size(), size()};
  }

  const std::vector<double>& masses() const { return masses_; }
  const std::vector<bool>& boundary() const { return boundary_; }

  /// Node coordinates; only assembled kernels carry them.
  bool has_coordinates() const { return !nodes_.empty(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes_[i].data(), static_cast<std::size_t>(dimension_)};
  }

  /// Cells per axis of the source mesh; {0, 0} for kernels built from
  /// matrices, whose nodes are taken as a 1D chain in index order.
  std::array<int, 2> resolution() const { return resolution_; }

  /// Extremes of p_ij over off-diagonal pairs.
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }

  friend Kernel assemble_kernel(const Mesh& mesh, const ExponentField& field, double rel_tol);

 private:
  void finalize();

  std::uint64_t mesh_id_ = 0;
  int dimension_ = 1;
  std::optional<double> order_;
  std::vector<double> weights_;
  std::vector<double> exponents_;
  std::vector<double> accuracy_;
  std::vector<double> masses_;
  std::vector<bool> boundary_;
  std::vector<std::array<double, 2>> nodes_;
  std::array<int, 2> resolution_{0, 0};
  double p_minus_ = 0.0;
  double p_plus_ = 0.0;
};

/// Assembles w_ij = pair_weight(cell_i, cell_j, s, p_ij) for every i != j with
/// p_ij = (p(x_i,x_j) + p(x_j,x_i)) / 2 at the cell centres. Each unordered
/// pair is computed once and mirrored. Throws OrderTooLarge/ExponentOutOfRange
/// if a node pair violates the exponent bounds, DisconnectedKernel, and
/// propagates BudgetExceeded / DivergentIntegral.
Kernel assemble_kernel(const Mesh& mesh, const ExponentField& field, double rel_tol);

/// Text format:
///   fracplap-kernel v1 N=<node count>
///   <i> <j> <w_ij> <p_ij>        one row per pair with i < j
///   masses
///   <m_i>                        one row per node
/// Reals are written with 17 significant digits so the round trip is exact.
void write_kernel(std::ostream& out, const Kernel& kernel);

/// Inverse of write_kernel. Boundary flags are not part of the format and
/// come back all false. Throws KernelFormatError.
Kernel read_kernel(std::istream& in);

}  // namespace fracplap
