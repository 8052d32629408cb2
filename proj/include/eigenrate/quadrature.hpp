#pragma once

#include "eigenrate/core.hpp"

#include <vector>

namespace eigenrate {

/// Quadrature rule on a reference element. `exact_degree` is the largest
/// total polynomial degree integrated exactly.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return points.size(); }
  double weight_sum() const;
};

/// Gauss-Legendre rule on [-1,1], 1 <= npts <= 20. Nodes are computed by
/// Newton iteration on P_n to 1e-15 and are symmetric about 0.
QuadratureRule gauss_legendre(int npts);

/// Tensor product of two 1D rules; reference element [-1,1]^2.
QuadratureRule tensor_rule(const QuadratureRule& rx, const QuadratureRule& ry);

/// Rule on the reference triangle {x,y >= 0, x+y <= 1}, exact for all
/// monomials of total degree <= degree (degree <= 10). Exactness is verified
/// at construction against the closed-form moments a! b! / (a+b+2)!.
QuadratureRule triangle_rule(int degree);

}  // namespace eigenrate
