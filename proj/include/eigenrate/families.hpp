#pragma once

#include "eigenrate/projection.hpp"

#include <map>
#include <string>
#include <vector>

namespace eigenrate {

enum class Conformity { Conforming, Nonconforming };

/// A degree-of-freedom functional: point value, point derivative, or facet
/// integral mean, attached to a mesh entity for global sharing.
struct DofFunctional {
  enum class Kind { PointValue, PointDeriv, FacetMean };
  enum class Entity { Vertex, FacetEntity, Cell };

  Kind kind = Kind::PointValue;
  Point point{0.0, 0.0};          // physical location (also facet midpoint)
  MultiIndex deriv{MultiIndex(0)};
  int facet = -1;                 // global facet id for FacetMean
  Entity entity = Entity::Vertex;
  int entity_id = -1;             // global vertex/facet/element id
  int comp = 0;
  int deriv_order = 0;            // drives boundary elimination per bc order

  double apply(const Mesh& mesh, const LocalPolynomial& lp) const;
  double apply(const Mesh& mesh, const ScalarField& f) const;
};

/// Reference element description: local polynomial space, DOF functionals,
/// conformity class and order parameter. Families are registered once and
/// immutable; look them up by name.
class ElementFamily {
 public:
  enum class Id { P1, P2, P3, Q1, Q2, S3, Intermediate, CR, Q1Rot, Hermite3 };

  static const ElementFamily& get(const std::string& name);
  static std::vector<std::string> registry_names();

  const std::string& name() const { return name_; }
  Id id() const { return id_; }
  Conformity conformity() const { return conformity_; }
  int r() const { return r_; }
  int m_max() const { return m_max_; }
  /// Families without DOF functionals participate only in projection studies.
  bool assemblable() const { return assemblable_; }
  bool supports(CellKind kind) const;

  /// Monomial support of the local space. For the rotated element the space
  /// is a strict subspace of the span of its support.
  MultiIndexSet ind_used(CellKind kind) const;

  /// Spanning polynomials on the canonical reference element.
  std::vector<Poly> span(CellKind kind) const;

  /// Spanning polynomials in the frame of a concrete element. Differs from
  /// span() only for the rotated element, whose quadratic member is built
  /// from physical coordinates so that its Laplacian vanishes on
  /// anisotropic boxes as well.
  std::vector<Poly> span_for_element(const Mesh& mesh, int elem) const;

  int local_degree(CellKind kind) const;
  int ndof_vertex(CellKind kind) const;
  int ndof_facet(CellKind kind) const;
  int ndof_cell(CellKind kind) const;
  int ndof_total(CellKind kind) const;

  /// DOF functionals of an element in canonical local order: vertex DOFs in
  /// element vertex order, facet DOFs in element facet order, then cell DOFs.
  std::vector<DofFunctional> functionals(const Mesh& mesh, int elem) const;

  /// Local basis dual to the functionals (unisolvence is checked; the
  /// generalized Vandermonde must stay below condition 1e8).
  std::vector<LocalPolynomial> basis(const Mesh& mesh, int elem) const;

 private:
  ElementFamily(Id id, std::string name, Conformity c, int r, int m_max, bool assemblable);
  static const std::map<std::string, ElementFamily>& registry();

  Id id_;
  std::string name_;
  Conformity conformity_;
  int r_;
  int m_max_;
  bool assemblable_;
};

/// Basis values/derivatives of every local shape function at a point.
std::vector<double> eval_basis(const ElementFamily& family, const Mesh& mesh, int elem,
                               const Point& x, const MultiIndex& deriv);

/// The split (Ind_used, r, Ind_{r,rest}) of a family's monomial support.
IndexSplit index_sets(const ElementFamily& family, CellKind kind);

/// Symbolic hypothesis check on the family's local span.
bool annihilation_check(const ElementFamily& family, int m, int r, CellKind kind);

}  // namespace eigenrate
