#include "fracplap/mesh.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace fracplap {

Domain Domain::interval(double a, double b) {
  Domain d;
  d.dimension = 1;
  d.lower = {a, 0.0};
  d.upper = {b, 0.0};
  return d;
}

Domain Domain::rectangle(double x0, double x1, double y0, double y1) {
  Domain d;
  d.dimension = 2;
  d.lower = {x0, y0};
  d.upper = {x1, y1};
  return d;
}

double Domain::measure() const {
  double m = upper[0] - lower[0];
  if (dimension == 2) m *= upper[1] - lower[1];
  return m;
}

void Domain::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw std::invalid_argument("domain dimension must be 1 or 2");
  }
  for (int a = 0; a < dimension; ++a) {
    if (!(upper[a] > lower[a])) {
      throw std::invalid_argument("domain extent along axis " + std::to_string(a) +
                                  " must be positive");
    }
  }
}

double Box::volume() const {
  double v = extent(0);
  if (dimension == 2) v *= extent(1);
  return v;
}

std::array<double, 2> Box::center() const {
  return {0.5 * (lower[0] + upper[0]), 0.5 * (lower[1] + upper[1])};
}

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::array<int, 2> Mesh::index_of(std::size_t i) const {
  const int nx = resolution_[0];
  return {static_cast<int>(i % nx), static_cast<int>(i / nx)};
}

Mesh build_mesh(const Domain& domain, std::array<int, 2> resolution) {
  domain.validate();
  if (domain.dimension == 1) resolution[1] = 1;
  for (int a = 0; a < domain.dimension; ++a) {
    if (resolution[a] < 2) throw std::invalid_argument("mesh resolution must be >= 2 per axis");
  }

  Mesh mesh;
  mesh.id_ = next_mesh_id();
  mesh.domain_ = domain;
  mesh.resolution_ = resolution;

  const int nx = resolution[0];
  const int ny = resolution[1];
  const double hx = (domain.upper[0] - domain.lower[0]) / nx;
  const double hy = domain.dimension == 2 ? (domain.upper[1] - domain.lower[1]) / ny : 0.0;

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Box cell;
      cell.dimension = domain.dimension;
      // Edges computed from the index, not by accumulation, so the last
      // cell ends exactly at the domain boundary.
      cell.lower[0] = ix == 0 ? domain.lower[0] : domain.lower[0] + ix * hx;
      cell.upper[0] = ix == nx - 1 ? domain.upper[0] : domain.lower[0] + (ix + 1) * hx;
      bool on_boundary = ix == 0 || ix == nx - 1;
      if (domain.dimension == 2) {
        cell.lower[1] = iy == 0 ? domain.lower[1] : domain.lower[1] + iy * hy;
        cell.upper[1] = iy == ny - 1 ? domain.upper[1] : domain.lower[1] + (iy + 1) * hy;
        on_boundary = on_boundary || iy == 0 || iy == ny - 1;
      }
      mesh.cells_.push_back(cell);
      mesh.nodes_.push_back(cell.center());
      mesh.masses_.push_back(cell.volume());
      mesh.boundary_.push_back(on_boundary);
    }
  }
  return mesh;
}

Mesh build_mesh(const Domain& domain, int resolution) {
  return build_mesh(domain, std::array<int, 2>{resolution, resolution});
}

}  // namespace fracplap
