#pragma once

#include "eigenrate/dofmap.hpp"

#include <iosfwd>

namespace eigenrate {

/// Sparse symmetric matrix in CSR form (full pattern stored).
struct SparseSym {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void mat_vec(const double* x, double* y) const;
  double frobenius_norm() const;
  int bandwidth() const;
  std::vector<double> to_dense() const;  // row-major n x n
};

/// Assembled stiffness/mass pair over the free DOFs after Dirichlet
/// elimination. A_ij = sum_K int_K grad^m phi_i . grad^m phi_j,
/// B_ij = sum_K int_K phi_i phi_j.
struct SymmetricPair {
  SparseSym A;
  SparseSym B;
  int n_free = 0;
};

SymmetricPair assemble(const Mesh& mesh, const ElementFamily& family, int m, const DofMap& dofmap);

/// Coordinate text dump (row col value, 17 significant digits).
void dump_matrix(const SparseSym& mat, std::ostream& os);

}  // namespace eigenrate
