#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fracplap/kernel.hpp"
#include "fracplap/mesh.hpp"

namespace fracplap {

/// Node values on a particular mesh.
///
/// When boundary_zero is set the values at boundary-flagged nodes are
/// exactly 0; construction throws std::invalid_argument otherwise.
class DiscreteFunction {
 public:
  DiscreteFunction() = default;
  DiscreteFunction(std::uint64_t mesh_id, std::vector<double> values,
                   std::shared_ptr<const std::vector<bool>> boundary_flags, bool boundary_zero);

  static DiscreteFunction on(const Mesh& mesh, std::vector<double> values,
                             bool boundary_zero = false);
  static DiscreteFunction on(const Kernel& kernel, std::vector<double> values,
                             bool boundary_zero = false);
  static DiscreteFunction zeros(const Kernel& kernel);

  std::uint64_t mesh_id() const { return mesh_id_; }
  bool boundary_zero() const { return boundary_zero_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  const std::vector<bool>& boundary_flags() const { return *boundary_flags_; }

  /// Same mesh, new values. boundary_zero is kept when the new values vanish
  /// on the boundary.
  DiscreteFunction with_values(std::vector<double> values) const;

  double max_abs() const;

 private:
  std::uint64_t mesh_id_ = 0;
  std::vector<double> values_;
  std::shared_ptr<const std::vector<bool>> boundary_flags_;
  bool boundary_zero_ = false;
};

/// Throws MeshMismatch unless u lives on the kernel's mesh.
void require_same_mesh(const Kernel& kernel, const DiscreteFunction& u);

}  // namespace fracplap
