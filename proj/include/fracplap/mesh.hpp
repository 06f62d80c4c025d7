#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fracplap {

/// Interval (N = 1) or axis-aligned rectangle (N = 2).
struct Domain {
  int dimension = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};

  static Domain interval(double a, double b);
  static Domain rectangle(double x0, double x1, double y0, double y1);

  double measure() const;
  /// Throws std::invalid_argument unless N is 1 or 2 and every extent is positive.
  void validate() const;
};

/// Axis-aligned box; only the first `dimension` components are meaningful.
struct Box {
  int dimension = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{0.0, 0.0};

  double volume() const;
  std::array<double, 2> center() const;
  double extent(int axis) const { return upper[axis] - lower[axis]; }
};

/// Fresh identifier for a node set; DiscreteFunction and Kernel use it to
/// detect values that belong to a different mesh.
std::uint64_t next_mesh_id();

/// Uniform cell-centred partition of a Domain.
class Mesh {
 public:
  std::uint64_t id() const { return id_; }
  const Domain& domain() const { return domain_; }
  int dimension() const { return domain_.dimension; }
  std::array<int, 2> resolution() const { return resolution_; }
  std::size_t size() const { return cells_.size(); }

  std::span<const double> node(std::size_t i) const {
    return {nodes_[i].data(), static_cast<std::size_t>(dimension())};
  }
  const Box& cell(std::size_t i) const { return cells_[i]; }
  const std::vector<double>& masses() const { return masses_; }
  const std::vector<bool>& boundary() const { return boundary_; }

  /// Multi-index (ix, iy) of node i; iy = 0 in 1D.
  std::array<int, 2> index_of(std::size_t i) const;

  friend Mesh build_mesh(const Domain& domain, std::array<int, 2> resolution);

 private:
  std::uint64_t id_ = 0;
  Domain domain_;
  std::array<int, 2> resolution_{0, 1};
  std::vector<std::array<double, 2>> nodes_;
  std::vector<Box> cells_;
  std::vector<double> masses_;
  std::vector<bool> boundary_;
};

/// resolution[1] is ignored in 1D. Each used entry must be >= 2.
Mesh build_mesh(const Domain& domain, std::array<int, 2> resolution);
Mesh build_mesh(const Domain& domain, int resolution);

}  // namespace fracplap
