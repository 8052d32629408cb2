#include "eigenrate/assembly.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace eigenrate {

void SparseSym::mat_vec(const double* x, double* y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

double SparseSym::frobenius_norm() const {
  double s = 0.0;
  for (double v : val) s += v * v;
  return std::sqrt(s);
}

int SparseSym::bandwidth() const {
  int bw = 0;
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) bw = std::max(bw, std::abs(i - col[k]));
  return bw;
}

std::vector<double> SparseSym::to_dense() const {
  std::vector<double> d(std::size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d[std::size_t(i) * n + col[k]] = val[k];
  return d;
}

namespace {

SparseSym from_row_maps(int n, const std::vector<std::map<int, double>>& rows) {
  SparseSym s;
  s.n = n;
  s.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) s.row_ptr[i + 1] = s.row_ptr[i] + int(rows[i].size());
  s.col.reserve(s.row_ptr[n]);
  s.val.reserve(s.row_ptr[n]);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, v] : rows[i]) {
      s.col.push_back(j);
      s.val.push_back(v);
    }
  return s;
}

}  // namespace

SymmetricPair assemble(const Mesh& mesh, const ElementFamily& family, int m, const DofMap& dofmap) {
  require(m >= 1 && m <= family.m_max(), "assemble: operator order beyond family support");
  require(family.supports(mesh.kind), "assemble: family/mesh mismatch");
  require(m == 1 || mesh.dim == 1, "assemble: fourth-order forms are 1D here");

  const int nf = dofmap.n_free;
  std::vector<std::map<int, double>> rows_a(nf), rows_b(nf);

  for (const auto& el : mesh.elements) {
    const auto basis = family.basis(mesh, el.id);
    const int nloc = int(basis.size());
    const int deg = family.local_degree(el.kind);
    const ElementQuadrature eq = element_quadrature(mesh, el.id, 2 * deg);

    // Precompute value and derivative polynomials once per element.
    std::vector<Poly> vals, dx, dy, dxx;
    const Frame fr = basis.front().frame;
    for (const auto& b : basis) {
      vals.push_back(b.p);
      if (m == 1) {
        dx.push_back(b.p.derivative(mesh.dim == 1 ? MultiIndex(1) : MultiIndex(1, 0)));
        if (mesh.dim == 2) dy.push_back(b.p.derivative(MultiIndex(0, 1)));
      } else {
        dxx.push_back(b.p.derivative(MultiIndex(2)));
      }
    }
    const double sx = 1.0 / fr.half[0];
    const double sy = mesh.dim == 2 ? 1.0 / fr.half[1] : 0.0;

    std::vector<double> a_loc(nloc * nloc, 0.0), b_loc(nloc * nloc, 0.0);
    std::vector<double> v(nloc), gx(nloc), gy(nloc);
    for (std::size_t q = 0; q < eq.points.size(); ++q) {
      const Point xr = fr.to_ref(eq.points[q]);
      const double w = eq.weights[q];
      for (int i = 0; i < nloc; ++i) {
        v[i] = vals[i].eval(xr);
        if (m == 1) {
          gx[i] = sx * dx[i].eval(xr);
          gy[i] = mesh.dim == 2 ? sy * dy[i].eval(xr) : 0.0;
        } else {
          gx[i] = sx * sx * dxx[i].eval(xr);  // second derivative in 1D
          gy[i] = 0.0;
        }
      }
      for (int i = 0; i < nloc; ++i)
        for (int j = i; j < nloc; ++j) {
          a_loc[i * nloc + j] += w * (gx[i] * gx[j] + gy[i] * gy[j]);
          b_loc[i * nloc + j] += w * v[i] * v[j];
        }
    }

    const auto& gdofs = dofmap.cell_dofs[el.id];
    for (int i = 0; i < nloc; ++i) {
      const int gi = dofmap.global_to_free[gdofs[i]];
      if (gi < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int gj = dofmap.global_to_free[gdofs[j]];
        if (gj < 0) continue;
        const double av = (i <= j) ? a_loc[i * nloc + j] : a_loc[j * nloc + i];
        const double bv = (i <= j) ? b_loc[i * nloc + j] : b_loc[j * nloc + i];
        rows_a[gi][gj] += av;
        rows_b[gi][gj] += bv;
      }
    }
  }

  SymmetricPair pair;
  pair.n_free = nf;
  pair.A = from_row_maps(nf, rows_a);
  pair.B = from_row_maps(nf, rows_b);
  return pair;
}

void dump_matrix(const SparseSym& mat, std::ostream& os) {
  char buf[64];
  for (int i = 0; i < mat.n; ++i)
    for (int k = mat.row_ptr[i]; k < mat.row_ptr[i + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i, mat.col[k], mat.val[k]);
      os << buf;
    }
}

}  // namespace eigenrate
