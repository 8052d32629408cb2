#pragma once

#include "eigenrate/fields.hpp"
#include "eigenrate/mesh.hpp"
#include "eigenrate/quadrature.hpp"

namespace eigenrate {

/// Affine map between physical coordinates and element-local scaled
/// coordinates (each direction mapped to [-1,1] over the bounding box).
struct Frame {
  int n = 1;
  Point center{0.0, 0.0};
  Point half{1.0, 1.0};

  Point to_ref(const Point& x) const {
    Point r{(x[0] - center[0]) / half[0], 0.0};
    if (n == 2) r[1] = (x[1] - center[1]) / half[1];
    return r;
  }
  Point to_phys(const Point& r) const {
    Point x{center[0] + half[0] * r[0], 0.0};
    if (n == 2) x[1] = center[1] + half[1] * r[1];
    return x;
  }
  /// Chain-rule factor turning a reference derivative D^g into a physical one.
  double deriv_scale(const MultiIndex& g) const {
    double s = 1.0;
    for (int d = 0; d < n; ++d)
      for (int k = 0; k < g.a[d]; ++k) s /= half[d];
    return s;
  }
};

Frame element_frame(const Mesh& mesh, int elem);

/// Polynomial attached to an element frame; evaluation and differentiation
/// are physical, storage is in scaled coordinates.
struct LocalPolynomial {
  Poly p;
  Frame frame;

  double eval(const Point& phys, const MultiIndex& deriv) const {
    return frame.deriv_scale(deriv) * p.derivative(deriv).eval(frame.to_ref(phys));
  }
  double eval(const Point& phys) const {
    return p.eval(frame.to_ref(phys));
  }
};

/// Quadrature points/weights of a rule mapped onto a physical element.
struct ElementQuadrature {
  std::vector<Point> points;   // physical
  std::vector<double> weights; // include the Jacobian
};

/// Rule of the requested polynomial exactness on the given element
/// (tensor Gauss for boxes/intervals, collapsed rule for triangles).
ElementQuadrature element_quadrature(const Mesh& mesh, int elem, int exact_degree);

/// Oversampled rule for error norms of non-polynomial integrands
/// (10 points per direction).
ElementQuadrature oversampled_quadrature(const Mesh& mesh, int elem);

/// L2(K)-orthogonal projection of `target` onto the monomial space spanned by
/// `space`, assembled in a scaled Legendre basis. The Gram system is solved
/// with quadrature exact to twice the maximal local degree; the algebraic
/// residual is checked to 1e-10 relative and the Gram condition number must
/// stay below 1e6.
LocalPolynomial project_local(const Mesh& mesh, int elem, const MultiIndexSet& space,
                              const ScalarField& target, int quad_points_per_dir = 0);

}  // namespace eigenrate
