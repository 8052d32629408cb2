#pragma once

#include "eigenrate/assembly.hpp"

namespace eigenrate {

/// Finite element function given by coefficients over the free DOFs;
/// eliminated boundary DOFs are implicit zeros.
struct FeFunction {
  const Mesh* mesh = nullptr;
  const ElementFamily* family = nullptr;
  const DofMap* dofmap = nullptr;
  std::vector<double> coeff;

  /// Element-local polynomial (sum of scaled local shapes).
  LocalPolynomial local_poly(int elem) const;

  double eval(const Point& x, const MultiIndex& deriv) const;
  double eval(const Point& x) const;
};

double eval_fe(const FeFunction& u, const Point& x, const MultiIndex& deriv);

/// Nodal/functional interpolant of a smooth field (boundary DOFs eliminated
/// by the map are dropped; pass a boundary-compatible field for exactness).
FeFunction interpolate(const Mesh& mesh, const ElementFamily& family, const DofMap& dofmap,
                       const ScalarField& f);

}  // namespace eigenrate
