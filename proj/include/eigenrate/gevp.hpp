#pragma once

#include "eigenrate/assembly.hpp"

namespace eigenrate {

/// Certified eigenpair of A x = lambda B x, B-normalized (x^T B x = 1).
struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vector;
  double residual = 0.0;  // ||A x - lambda B x||_2 / ||A||_F
};

struct SolveOptions {
  enum class Method { Auto, Dense, ShiftInvert };
  Method method = Method::Auto;
  int dense_limit = 4096;        // hard cap of the dense path
  int iterative_threshold = 1200;  // Auto switches to shift-invert above this
};

/// Dense Cholesky factor (lower triangular, row-major). Throws if the matrix
/// is not symmetric positive definite.
std::vector<double> cholesky_dense(std::vector<double> b, int n);

/// C = L^{-1} A L^{-T} for a lower factor L (row-major inputs).
std::vector<double> reduce_to_standard(const std::vector<double>& a, const std::vector<double>& l,
                                       int n);

/// Full eigendecomposition of a dense symmetric matrix: Householder
/// tridiagonalization followed by implicit-shift QL (50 sweeps per
/// eigenvalue). On return `a` holds the eigenvectors in its columns and
/// `eigval` the unsorted eigenvalues.
void sym_eigen(std::vector<double>& a, int n, std::vector<double>& eigval);

/// The k smallest eigenpairs of the assembled pair. Every returned pair is
/// certified: residual <= 1e-10 and pairwise B-orthonormality <= 1e-10.
/// Near-degenerate values are ordered by the index of the first dominant
/// coefficient.
std::vector<EigenPair> solve_gevp(const SymmetricPair& pair, int k, const SolveOptions& opts = {});

}  // namespace eigenrate
