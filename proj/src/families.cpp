#include "eigenrate/families.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace eigenrate {

namespace {

// 3-point Gauss mean of a function along a mesh facet (segment).
template <typename F>
double facet_mean(const Mesh& mesh, int facet, F&& f) {
  const Facet& fc = mesh.facets[facet];
  require(fc.verts.size() == 2, "facet_mean: needs a 2D facet");
  const Point& a = mesh.vertices[fc.verts[0]];
  const Point& b = mesh.vertices[fc.verts[1]];
  const QuadratureRule g = gauss_legendre(3);
  double s = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q) {
    const double t = 0.5 * (g.points[q][0] + 1.0);
    const Point x{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    s += 0.5 * g.weights[q] * f(x);
  }
  return s;  // weights integrate t over [0,1], so s is already the mean
}

Point vertex_point(const Mesh& mesh, int v) { return mesh.vertices[v]; }

Point facet_midpoint(const Mesh& mesh, int f) {
  const Facet& fc = mesh.facets[f];
  const Point& a = mesh.vertices[fc.verts[0]];
  const Point& b = mesh.vertices[fc.verts[1]];
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
}

}  // namespace

const std::map<std::string, ElementFamily>& ElementFamily::registry() {
  static const std::map<std::string, ElementFamily> reg = [] {
    std::map<std::string, ElementFamily> m;
    auto add = [&m](ElementFamily f) { m.emplace(f.name(), std::move(f)); };
    add(ElementFamily(Id::P1, "p1", Conformity::Conforming, 2, 1, true));
    add(ElementFamily(Id::P2, "p2", Conformity::Conforming, 3, 1, true));
    add(ElementFamily(Id::P3, "p3", Conformity::Conforming, 4, 1, true));
    add(ElementFamily(Id::Q1, "q1", Conformity::Conforming, 2, 1, true));
    add(ElementFamily(Id::Q2, "q2", Conformity::Conforming, 3, 1, true));
    add(ElementFamily(Id::S3, "s3", Conformity::Conforming, 3, 1, true));
    add(ElementFamily(Id::Intermediate, "intermediate", Conformity::Conforming, 4, 1, false));
    add(ElementFamily(Id::CR, "cr", Conformity::Nonconforming, 2, 1, true));
    add(ElementFamily(Id::Q1Rot, "q1rot", Conformity::Nonconforming, 2, 1, true));
    add(ElementFamily(Id::Hermite3, "hermite3", Conformity::Conforming, 4, 2, true));
    return m;
  }();
  return reg;
}

double DofFunctional::apply(const Mesh& mesh, const LocalPolynomial& lp) const {
  switch (kind) {
    case Kind::PointValue:
      return lp.eval(point);
    case Kind::PointDeriv:
      return lp.eval(point, deriv);
    case Kind::FacetMean:
      return facet_mean(mesh, facet, [&](const Point& x) { return lp.eval(x); });
  }
  fail("DofFunctional::apply: unknown kind");
}

double DofFunctional::apply(const Mesh& mesh, const ScalarField& f) const {
  switch (kind) {
    case Kind::PointValue:
      return f(point);
    case Kind::PointDeriv:
      return f.eval(point, deriv);
    case Kind::FacetMean:
      return facet_mean(mesh, facet, [&](const Point& x) { return f(x); });
  }
  fail("DofFunctional::apply: unknown kind");
}

ElementFamily::ElementFamily(Id id, std::string name, Conformity c, int r, int m_max,
                             bool assemblable)
    : id_(id), name_(std::move(name)), conformity_(c), r_(r), m_max_(m_max),
      assemblable_(assemblable) {}

const ElementFamily& ElementFamily::get(const std::string& name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  require(it != reg.end(), "unknown element family: " + name);
  return it->second;
}

std::vector<std::string> ElementFamily::registry_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

bool ElementFamily::supports(CellKind kind) const {
  switch (id_) {
    case Id::P1:
    case Id::P2:
    case Id::P3:
      return kind == CellKind::Interval || kind == CellKind::Triangle;
    case Id::Q1:
    case Id::Q2:
    case Id::S3:
    case Id::Intermediate:
    case Id::Q1Rot:
      return kind == CellKind::Rectangle;
    case Id::CR:
      return kind == CellKind::Triangle;
    case Id::Hermite3:
      return kind == CellKind::Interval;
  }
  return false;
}

MultiIndexSet ElementFamily::ind_used(CellKind kind) const {
  require(supports(kind), name_ + ": unsupported cell kind");
  const int n = (kind == CellKind::Interval) ? 1 : 2;
  switch (id_) {
    case Id::P1:
    case Id::CR:
      return enumerate_indices(n, 1);
    case Id::P2:
      return enumerate_indices(n, 2);
    case Id::P3:
      return enumerate_indices(n, 3);
    case Id::Q1: {
      MultiIndexSet s = enumerate_indices(2, 1);
      s.insert(MultiIndex(1, 1));
      return s;
    }
    case Id::Q2: {
      MultiIndexSet s(2);
      for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) s.insert(MultiIndex(i, j));
      return s;
    }
    case Id::S3: {
      MultiIndexSet s = enumerate_indices(2, 2);
      s.insert(MultiIndex(2, 1));
      s.insert(MultiIndex(1, 2));
      return s;
    }
    case Id::Intermediate: {
      MultiIndexSet s(2);
      for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3 && i + j <= 5; ++j) s.insert(MultiIndex(i, j));
      return s;
    }
    case Id::Q1Rot: {
      MultiIndexSet s = enumerate_indices(2, 1);
      s.insert(MultiIndex(2, 0));
      s.insert(MultiIndex(0, 2));
      return s;
    }
    case Id::Hermite3:
      return enumerate_indices(1, 3);
  }
  fail("ind_used: unreachable");
}

std::vector<Poly> ElementFamily::span(CellKind kind) const {
  if (id_ == Id::Q1Rot) {
    Poly rot = Poly::monomial(MultiIndex(2, 0), 1.0);
    rot.axpy(-1.0, Poly::monomial(MultiIndex(0, 2), 1.0));
    return {Poly::monomial(MultiIndex(0, 0)), Poly::monomial(MultiIndex(1, 0)),
            Poly::monomial(MultiIndex(0, 1)), rot};
  }
  std::vector<Poly> out;
  const MultiIndexSet used = ind_used(kind);
  for (const auto& m : used.members()) out.push_back(Poly::monomial(m));
  return out;
}

std::vector<Poly> ElementFamily::span_for_element(const Mesh& mesh, int elem) const {
  if (id_ != Id::Q1Rot) return span(mesh.elements[elem].kind);
  const Frame fr = element_frame(mesh, elem);
  // (x - cx)^2 - (y - cy)^2 expressed in scaled coordinates.
  Poly rot = Poly::monomial(MultiIndex(2, 0), fr.half[0] * fr.half[0]);
  rot.axpy(-fr.half[1] * fr.half[1], Poly::monomial(MultiIndex(0, 2), 1.0));
  return {Poly::monomial(MultiIndex(0, 0)), Poly::monomial(MultiIndex(1, 0)),
          Poly::monomial(MultiIndex(0, 1)), rot};
}

int ElementFamily::local_degree(CellKind kind) const {
  return ind_used(kind).max_order();
}

int ElementFamily::ndof_vertex(CellKind kind) const {
  (void)kind;
  require(assemblable_, name_ + ": projection-only family has no DOF functionals");
  switch (id_) {
    case Id::CR:
    case Id::Q1Rot:
      return 0;
    case Id::Hermite3:
      return 2;
    default:
      return 1;
  }
}

int ElementFamily::ndof_facet(CellKind kind) const {
  require(assemblable_, name_ + ": projection-only family has no DOF functionals");
  if (kind == CellKind::Interval) return 0;  // 1D facet DOFs live on vertices
  switch (id_) {
    case Id::P2:
    case Id::Q2:
    case Id::S3:
      return 1;
    case Id::P3:
      return 2;
    case Id::CR:
    case Id::Q1Rot:
      return 1;
    default:
      return 0;
  }
}

int ElementFamily::ndof_cell(CellKind kind) const {
  require(assemblable_, name_ + ": projection-only family has no DOF functionals");
  if (kind == CellKind::Interval) {
    switch (id_) {
      case Id::P2:
        return 1;
      case Id::P3:
        return 2;
      default:
        return 0;
    }
  }
  switch (id_) {
    case Id::P3:
      return 1;  // centroid
    case Id::Q2:
      return 1;  // center
    default:
      return 0;
  }
}

int ElementFamily::ndof_total(CellKind kind) const {
  int nv = 0, nf = 0;
  switch (kind) {
    case CellKind::Interval:
      nv = 2;
      nf = 0;
      break;
    case CellKind::Triangle:
      nv = 3;
      nf = 3;
      break;
    case CellKind::Rectangle:
      nv = 4;
      nf = 4;
      break;
  }
  return nv * ndof_vertex(kind) + nf * ndof_facet(kind) + ndof_cell(kind);
}

std::vector<DofFunctional> ElementFamily::functionals(const Mesh& mesh, int elem) const {
  require(assemblable_, name_ + ": projection-only family has no DOF functionals");
  const Element& el = mesh.elements[elem];
  require(supports(el.kind), name_ + ": unsupported cell kind");
  std::vector<DofFunctional> out;

  const int ndv = ndof_vertex(el.kind);
  for (int lv = 0; lv < int(el.verts.size()); ++lv) {
    const int v = el.verts[lv];
    for (int c = 0; c < ndv; ++c) {
      DofFunctional d;
      d.point = vertex_point(mesh, v);
      d.entity = DofFunctional::Entity::Vertex;
      d.entity_id = v;
      d.comp = c;
      if (id_ == Id::Hermite3 && c == 1) {
        d.kind = DofFunctional::Kind::PointDeriv;
        d.deriv = MultiIndex(1);
        d.deriv_order = 1;
      }
      out.push_back(d);
    }
  }

  const int ndf = ndof_facet(el.kind);
  if (ndf > 0) {
    for (int lf = 0; lf < int(el.facets.size()); ++lf) {
      const int f = el.facets[lf];
      const Facet& fc = mesh.facets[f];
      for (int c = 0; c < ndf; ++c) {
        DofFunctional d;
        d.entity = DofFunctional::Entity::FacetEntity;
        d.entity_id = f;
        d.comp = c;
        if (id_ == Id::CR || id_ == Id::Q1Rot) {
          d.kind = DofFunctional::Kind::FacetMean;
          d.facet = f;
          d.point = facet_midpoint(mesh, f);
        } else if (ndf == 1) {
          d.point = facet_midpoint(mesh, f);
        } else {
          // Two points per edge, parameterized from the smaller global
          // vertex id so both neighbors generate identical functionals.
          const int va = std::min(fc.verts[0], fc.verts[1]);
          const int vb = std::max(fc.verts[0], fc.verts[1]);
          const Point& a = mesh.vertices[va];
          const Point& b = mesh.vertices[vb];
          const double t = (c + 1) / 3.0;
          d.point = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
        }
        out.push_back(d);
      }
    }
  }

  const int ndc = ndof_cell(el.kind);
  if (ndc > 0) {
    const Frame fr = element_frame(mesh, elem);
    for (int c = 0; c < ndc; ++c) {
      DofFunctional d;
      d.entity = DofFunctional::Entity::Cell;
      d.entity_id = elem;
      d.comp = c;
      if (el.kind == CellKind::Interval) {
        const double t = (ndc == 1) ? 0.5 : (c + 1) / 3.0;
        const Point& a = mesh.vertices[el.verts[0]];
        const Point& b = mesh.vertices[el.verts[1]];
        d.point = {a[0] + t * (b[0] - a[0]), 0.0};
      } else if (el.kind == CellKind::Triangle) {
        const Point& p0 = mesh.vertices[el.verts[0]];
        const Point& p1 = mesh.vertices[el.verts[1]];
        const Point& p2 = mesh.vertices[el.verts[2]];
        d.point = {(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0};
      } else {
        d.point = fr.center;
      }
      out.push_back(d);
    }
  }
  return out;
}

std::vector<LocalPolynomial> ElementFamily::basis(const Mesh& mesh, int elem) const {
  const std::vector<Poly> sp = span_for_element(mesh, elem);
  const std::vector<DofFunctional> fns = functionals(mesh, elem);
  const int dim = int(sp.size());
  ensure(int(fns.size()) == dim, name_ + ": DOF count does not match local space dimension");
  const Frame fr = element_frame(mesh, elem);

  // Generalized Vandermonde V_ij = F_i(s_j).
  std::vector<double> V(dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) V[i * dim + j] = fns[i].apply(mesh, LocalPolynomial{sp[j], fr});

  // Invert column by column; check unisolvence through the condition number.
  std::vector<double> Vc = V;
  std::vector<double> inv(dim * dim);
  {
    // Local partial-pivot LU (sizes <= 15).
    std::vector<int> piv(dim);
    for (int i = 0; i < dim; ++i) piv[i] = i;
    for (int k = 0; k < dim; ++k) {
      int imax = k;
      for (int i = k + 1; i < dim; ++i)
        if (std::abs(Vc[i * dim + k]) > std::abs(Vc[imax * dim + k])) imax = i;
      if (imax != k) {
        for (int j = 0; j < dim; ++j) std::swap(Vc[k * dim + j], Vc[imax * dim + j]);
        std::swap(piv[k], piv[imax]);
      }
      ensure(Vc[k * dim + k] != 0.0, name_ + ": DOF functionals are not unisolvent");
      for (int i = k + 1; i < dim; ++i) {
        Vc[i * dim + k] /= Vc[k * dim + k];
        for (int j = k + 1; j < dim; ++j) Vc[i * dim + j] -= Vc[i * dim + k] * Vc[k * dim + j];
      }
    }
    for (int col = 0; col < dim; ++col) {
      std::vector<double> x(dim, 0.0);
      for (int i = 0; i < dim; ++i) x[i] = (piv[i] == col) ? 1.0 : 0.0;
      for (int i = 1; i < dim; ++i)
        for (int j = 0; j < i; ++j) x[i] -= Vc[i * dim + j] * x[j];
      for (int i = dim - 1; i >= 0; --i) {
        for (int j = i + 1; j < dim; ++j) x[i] -= Vc[i * dim + j] * x[j];
        x[i] /= Vc[i * dim + i];
      }
      for (int i = 0; i < dim; ++i) inv[i * dim + col] = x[i];
    }
  }

  double nV = 0.0, nI = 0.0;
  for (int i = 0; i < dim; ++i) {
    double sv = 0.0, si = 0.0;
    for (int j = 0; j < dim; ++j) {
      sv += std::abs(V[i * dim + j]);
      si += std::abs(inv[i * dim + j]);
    }
    nV = std::max(nV, sv);
    nI = std::max(nI, si);
  }
  ensure(nV * nI < 1e8, name_ + ": unisolvence condition number exceeds 1e8");

  std::vector<LocalPolynomial> out(dim);
  for (int j = 0; j < dim; ++j) {
    Poly pj = Poly::zero(sp.front().n);
    for (int k = 0; k < dim; ++k) pj.axpy(inv[k * dim + j], sp[k]);
    out[j] = LocalPolynomial{pj, fr};
  }
  return out;
}

std::vector<double> eval_basis(const ElementFamily& family, const Mesh& mesh, int elem,
                               const Point& x, const MultiIndex& deriv) {
  require(deriv.order() <= family.m_max(), "eval_basis: derivative order beyond family support");
  std::vector<double> out;
  for (const auto& b : family.basis(mesh, elem)) out.push_back(b.eval(x, deriv));
  return out;
}

IndexSplit index_sets(const ElementFamily& family, CellKind kind) {
  return index_split(family.ind_used(kind));
}

bool annihilation_check(const ElementFamily& family, int m, int r, CellKind kind) {
  return annihilation_check(family.span(kind), m, r);
}

}  // namespace eigenrate
