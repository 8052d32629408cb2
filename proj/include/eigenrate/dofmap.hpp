#pragma once

#include "eigenrate/families.hpp"

namespace eigenrate {

/// Global degree-of-freedom numbering. DOFs are ordered by the geometric
/// location of their functionals (y, then x), which keeps the matrix
/// bandwidth small on structured meshes.
struct DofMap {
  int n_total = 0;
  int n_free = 0;
  std::vector<std::vector<int>> cell_dofs;  // per element, local -> global
  std::vector<char> is_boundary;            // per global DOF
  std::vector<int> global_to_free;          // -1 for eliminated DOFs
  std::vector<int> free_to_global;
  std::vector<Point> dof_point;             // representative location per DOF
  std::vector<int> dof_deriv_order;         // functional derivative order
};

/// Number all DOFs and mark those eliminated by the homogeneous Dirichlet
/// condition of order `bc_order` (functionals of derivative order < bc_order
/// sitting on the boundary are eliminated; bc_order 0 keeps everything).
DofMap build_dofmap(const Mesh& mesh, const ElementFamily& family, int bc_order);

}  // namespace eigenrate
