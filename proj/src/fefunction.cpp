#include "eigenrate/fefunction.hpp"

namespace eigenrate {

LocalPolynomial FeFunction::local_poly(int elem) const {
  const auto basis = family->basis(*mesh, elem);
  const auto& gdofs = dofmap->cell_dofs[elem];
  LocalPolynomial out;
  out.frame = basis.front().frame;
  out.p = Poly::zero(mesh->dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int f = dofmap->global_to_free[gdofs[i]];
    if (f < 0) continue;
    out.p.axpy(coeff[f], basis[i].p);
  }
  return out;
}

double FeFunction::eval(const Point& x, const MultiIndex& deriv) const {
  const int elem = mesh->locate(x);
  return local_poly(elem).eval(x, deriv);
}

double FeFunction::eval(const Point& x) const {
  return eval(x, mesh->dim == 1 ? MultiIndex(0) : MultiIndex(0, 0));
}

double eval_fe(const FeFunction& u, const Point& x, const MultiIndex& deriv) {
  return u.eval(x, deriv);
}

FeFunction interpolate(const Mesh& mesh, const ElementFamily& family, const DofMap& dofmap,
                       const ScalarField& f) {
  FeFunction u;
  u.mesh = &mesh;
  u.family = &family;
  u.dofmap = &dofmap;
  u.coeff.assign(dofmap.n_free, 0.0);
  std::vector<char> seen(dofmap.n_total, 0);
  for (const auto& el : mesh.elements) {
    const auto fns = family.functionals(mesh, el.id);
    const auto& gdofs = dofmap.cell_dofs[el.id];
    for (std::size_t i = 0; i < fns.size(); ++i) {
      const int g = gdofs[i];
      if (seen[g]) continue;
      seen[g] = 1;
      const int fr = dofmap.global_to_free[g];
      if (fr >= 0) u.coeff[fr] = fns[i].apply(mesh, f);
    }
  }
  return u;
}

}  // namespace eigenrate
