#include "fracplap/discrete_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracplap/errors.hpp"

namespace fracplap {

DiscreteFunction::DiscreteFunction(std::uint64_t mesh_id, std::vector<double> values,
                                   std::shared_ptr<const std::vector<bool>> boundary_flags,
                                   bool boundary_zero)
    : mesh_id_(mesh_id),
      values_(std::move(values)),
      boundary_flags_(std::move(boundary_flags)),
      boundary_zero_(boundary_zero) {
  if (!boundary_flags_ || values_.size() != boundary_flags_->size()) {
    throw std::invalid_argument("function length " + std::to_string(values_.size()) +
                                " differs from node count");
  }
  if (boundary_zero_) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if ((*boundary_flags_)[i] && values_[i] != 0.0) {
        throw std::invalid_argument("boundary-zero function is nonzero at boundary node " +
                                    std::to_string(i));
      }
    }
  }
}

DiscreteFunction DiscreteFunction::on(const Mesh& mesh, std::vector<double> values,
                                      bool boundary_zero) {
  return {mesh.id(), std::move(values), std::make_shared<const std::vector<bool>>(mesh.boundary()),
          boundary_zero};
}

DiscreteFunction DiscreteFunction::on(const Kernel& kernel, std::vector<double> values,
                                      bool boundary_zero) {
  return {kernel.mesh_id(), std::move(values),
          std::make_shared<const std::vector<bool>>(kernel.boundary()), boundary_zero};
}

DiscreteFunction DiscreteFunction::zeros(const Kernel& kernel) {
  return on(kernel, std::vector<double>(kernel.size(), 0.0), true);
}

DiscreteFunction DiscreteFunction::with_values(std::vector<double> values) const {
  bool zero_on_boundary = true;
  for (std::size_t i = 0; i < values.size() && i < boundary_flags_->size(); ++i) {
    if ((*boundary_flags_)[i] && values[i] != 0.0) zero_on_boundary = false;
  }
  return {mesh_id_, std::move(values), boundary_flags_, boundary_zero_ && zero_on_boundary};
}

double DiscreteFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void require_same_mesh(const Kernel& kernel, const DiscreteFunction& u) {
  if (u.mesh_id() != kernel.mesh_id() || u.size() != kernel.size()) {
    throw MeshMismatch("function (mesh " + std::to_string(u.mesh_id()) + ", " +
                       std::to_string(u.size()) + " nodes) does not live on kernel mesh " +
                       std::to_string(kernel.mesh_id()) + " (" + std::to_string(kernel.size()) +
                       " nodes)");
  }
}

}  // namespace fracplap
