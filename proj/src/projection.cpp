#include "eigenrate/projection.hpp"

#include <cmath>

namespace eigenrate {

namespace {

// Dense solve with partial pivoting; also returns the inverse for the
// condition estimate. Sizes here are at most ~16.
struct SmallLU {
  int n;
  std::vector<double> lu;
  std::vector<int> piv;

  explicit SmallLU(std::vector<double> a, int n_) : n(n_), lu(std::move(a)), piv(n_) {
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
      int imax = k;
      for (int i = k + 1; i < n; ++i)
        if (std::abs(lu[i * n + k]) > std::abs(lu[imax * n + k])) imax = i;
      if (imax != k) {
        for (int j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[imax * n + j]);
        std::swap(piv[k], piv[imax]);
      }
      ensure(lu[k * n + k] != 0.0, "project_local: singular Gram matrix");
      for (int i = k + 1; i < n; ++i) {
        lu[i * n + k] /= lu[k * n + k];
        for (int j = k + 1; j < n; ++j) lu[i * n + j] -= lu[i * n + k] * lu[k * n + j];
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu[i * n + j] * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu[i * n + j] * x[j];
      x[i] /= lu[i * n + i];
    }
    return x;
  }
};

// Collapsed tensor rule on the reference triangle with npts Gauss points per
// direction; used when the tabulated degrees are not enough (oversampling).
QuadratureRule collapsed_triangle_rule(int npts) {
  const QuadratureRule g = gauss_legendre(npts);
  QuadratureRule rule;
  rule.exact_degree = 2 * npts - 2;
  for (int i = 0; i < npts; ++i) {
    const double u = 0.5 * (g.points[i][0] + 1.0);
    const double wu = 0.5 * g.weights[i];
    for (int j = 0; j < npts; ++j) {
      const double v = 0.5 * (g.points[j][0] + 1.0);
      const double wv = 0.5 * g.weights[j];
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(wu * wv * (1.0 - u));
    }
  }
  return rule;
}

double norm_inf_rows(const std::vector<double>& a, int n) {
  double v = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::abs(a[i * n + j]);
    v = std::max(v, s);
  }
  return v;
}

}  // namespace

Frame element_frame(const Mesh& mesh, int elem) {
  const Element& el = mesh.elements[elem];
  Frame fr;
  fr.n = mesh.dim;
  double xlo = mesh.vertices[el.verts[0]][0], xhi = xlo;
  double ylo = mesh.vertices[el.verts[0]][1], yhi = ylo;
  for (int v : el.verts) {
    xlo = std::min(xlo, mesh.vertices[v][0]);
    xhi = std::max(xhi, mesh.vertices[v][0]);
    ylo = std::min(ylo, mesh.vertices[v][1]);
    yhi = std::max(yhi, mesh.vertices[v][1]);
  }
  fr.center = {0.5 * (xlo + xhi), 0.5 * (ylo + yhi)};
  fr.half = {0.5 * (xhi - xlo), mesh.dim == 2 ? 0.5 * (yhi - ylo) : 1.0};
  return fr;
}

ElementQuadrature element_quadrature(const Mesh& mesh, int elem, int exact_degree) {
  const Element& el = mesh.elements[elem];
  ElementQuadrature out;
  if (el.kind == CellKind::Interval) {
    const QuadratureRule g = gauss_legendre(std::min(20, exact_degree / 2 + 1));
    const Frame fr = element_frame(mesh, elem);
    for (std::size_t q = 0; q < g.size(); ++q) {
      out.points.push_back(fr.to_phys(g.points[q]));
      out.weights.push_back(g.weights[q] * fr.half[0]);
    }
  } else if (el.kind == CellKind::Rectangle) {
    const QuadratureRule g = gauss_legendre(std::min(20, exact_degree / 2 + 1));
    const QuadratureRule r2 = tensor_rule(g, g);
    const Frame fr = element_frame(mesh, elem);
    for (std::size_t q = 0; q < r2.size(); ++q) {
      out.points.push_back(fr.to_phys(r2.points[q]));
      out.weights.push_back(r2.weights[q] * fr.half[0] * fr.half[1]);
    }
  } else {
    const QuadratureRule tr = exact_degree <= 10
                                  ? triangle_rule(exact_degree)
                                  : collapsed_triangle_rule(std::min(20, exact_degree / 2 + 1));
    const Point& p0 = mesh.vertices[el.verts[0]];
    const Point& p1 = mesh.vertices[el.verts[1]];
    const Point& p2 = mesh.vertices[el.verts[2]];
    const double jac = 2.0 * el.measure;  // |det| of the affine map
    for (std::size_t q = 0; q < tr.size(); ++q) {
      const double s = tr.points[q][0], t = tr.points[q][1];
      out.points.push_back({p0[0] + (p1[0] - p0[0]) * s + (p2[0] - p0[0]) * t,
                            p0[1] + (p1[1] - p0[1]) * s + (p2[1] - p0[1]) * t});
      out.weights.push_back(tr.weights[q] * jac);
    }
  }
  return out;
}

ElementQuadrature oversampled_quadrature(const Mesh& mesh, int elem) {
  return element_quadrature(mesh, elem, 19);
}

LocalPolynomial project_local(const Mesh& mesh, int elem, const MultiIndexSet& space,
                              const ScalarField& target, int quad_points_per_dir) {
  require(space.dim() == mesh.dim, "project_local: space/mesh dimension mismatch");
  require(!space.empty(), "project_local: empty space");
  const int dim = int(space.size());
  const int maxdeg = space.max_order();

  const int exact = quad_points_per_dir > 0 ? (2 * quad_points_per_dir - 1)
                                            : std::max(2 * maxdeg, 19);
  const ElementQuadrature eq = element_quadrature(mesh, elem, exact);
  const Frame fr = element_frame(mesh, elem);

  // Scaled Legendre basis keeps the Gram matrix well conditioned.
  std::vector<Poly> basis;
  basis.reserve(dim);
  for (const auto& m : space.members()) basis.push_back(legendre_product(m));

  std::vector<std::vector<double>> bval(dim, std::vector<double>(eq.points.size()));
  for (int a = 0; a < dim; ++a)
    for (std::size_t q = 0; q < eq.points.size(); ++q)
      bval[a][q] = basis[a].eval(fr.to_ref(eq.points[q]));

  std::vector<double> gram(dim * dim, 0.0), rhs(dim, 0.0);
  for (std::size_t q = 0; q < eq.points.size(); ++q) {
    const double fq = target(eq.points[q]);
    const double w = eq.weights[q];
    for (int a = 0; a < dim; ++a) {
      rhs[a] += w * fq * bval[a][q];
      for (int b = a; b < dim; ++b) gram[a * dim + b] += w * bval[a][q] * bval[b][q];
    }
  }
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < a; ++b) gram[a * dim + b] = gram[b * dim + a];

  const SmallLU lu(gram, dim);
  const std::vector<double> c = lu.solve(rhs);

  // Condition estimate via the explicit inverse (tiny systems).
  std::vector<double> inv(dim * dim);
  for (int j = 0; j < dim; ++j) {
    std::vector<double> e(dim, 0.0);
    e[j] = 1.0;
    const std::vector<double> col = lu.solve(e);
    for (int i = 0; i < dim; ++i) inv[i * dim + j] = col[i];
  }
  const double cond = norm_inf_rows(gram, dim) * norm_inf_rows(inv, dim);
  ensure(cond < 1e6, "project_local: Gram matrix condition exceeds 1e6");

  // Algebraic residual: the projection residual must be quadrature-orthogonal
  // to every basis member.
  double resid = 0.0, scale = 0.0;
  for (int a = 0; a < dim; ++a) {
    double ga = -rhs[a];
    for (int b = 0; b < dim; ++b) ga += gram[a * dim + b] * c[b];
    resid = std::max(resid, std::abs(ga));
    scale = std::max(scale, std::abs(rhs[a]));
  }
  ensure(resid <= 1e-10 * std::max(scale, 1e-30), "project_local: orthogonality residual too large");

  LocalPolynomial out;
  out.frame = fr;
  out.p = Poly::zero(mesh.dim);
  for (int a = 0; a < dim; ++a) out.p.axpy(c[a], basis[a]);
  return out;
}

}  // namespace eigenrate
