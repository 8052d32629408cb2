#include "doctest.h"

#include "eigenrate/gevp.hpp"

#include <cmath>

using namespace eigenrate;

namespace {

SparseSym sparse_from_dense(const std::vector<double>& d, int n) {
  SparseSym s;
  s.n = n;
  s.row_ptr.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (d[i * n + j] != 0.0) {
        s.col.push_back(j);
        s.val.push_back(d[i * n + j]);
      }
    s.row_ptr[i + 1] = int(s.col.size());
  }
  return s;
}

SymmetricPair pair_from_dense(const std::vector<double>& a, const std::vector<double>& b, int n) {
  SymmetricPair p;
  p.n_free = n;
  p.A = sparse_from_dense(a, n);
  p.B = sparse_from_dense(b, n);
  return p;
}

SymmetricPair p1_interval_pair(int cells, DofMap& dm_out, Mesh& mesh_out) {
  mesh_out = interval_mesh(0.0, 1.0, cells);
  const ElementFamily& p1 = ElementFamily::get("p1");
  dm_out = build_dofmap(mesh_out, p1, 1);
  return assemble(mesh_out, p1, 1, dm_out);
}

double dispersion_p1(int k, double h) {
  return 6.0 / (h * h) * (1.0 - std::cos(k * M_PI * h)) / (2.0 + std::cos(k * M_PI * h));
}

}  // namespace

TEST_CASE("dense Cholesky factors") {
  {
    const std::vector<double> eye{1, 0, 0, 1};
    const auto l = cholesky_dense(eye, 2);
    CHECK(l == eye);
  }
  {
    const std::vector<double> b{4, 2, 2, 3};
    const auto l = cholesky_dense(b, 2);
    CHECK(l[0] == doctest::Approx(2.0));
    CHECK(l[1] == 0.0);
    CHECK(l[2] == doctest::Approx(1.0));
    CHECK(l[3] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  CHECK_THROWS(cholesky_dense({1, 2, 2, 1}, 2));  // indefinite
}

TEST_CASE("Cholesky reconstructs the linear mass matrix to machine precision") {
  Mesh mesh;
  DofMap dm;
  const SymmetricPair pair = p1_interval_pair(4, dm, mesh);
  REQUIRE(pair.n_free == 3);
  const auto b = pair.B.to_dense();
  const auto l = cholesky_dense(b, 3);
  double err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double r = b[i * 3 + j];
      for (int k = 0; k < 3; ++k) r -= l[i * 3 + k] * l[j * 3 + k];
      err += r * r;
    }
  CHECK(std::sqrt(err) <= 1e-15);
}

TEST_CASE("decoupled generalized problems") {
  const SymmetricPair p = pair_from_dense({2, 0, 0, 6}, {1, 0, 0, 2}, 2);
  const auto pairs = solve_gevp(p, 2);
  CHECK(pairs[0].lambda == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(pairs[1].lambda == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("2x2 standard problem by characteristic polynomial") {
  const SymmetricPair p = pair_from_dense({2, -1, -1, 2}, {1, 0, 0, 1}, 2);
  const auto pairs = solve_gevp(p, 2);
  CHECK(pairs[0].lambda == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(pairs[1].lambda == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("linear elements reproduce the discrete dispersion relation") {
  Mesh mesh;
  DofMap dm;
  {
    const SymmetricPair pair = p1_interval_pair(4, dm, mesh);
    const auto pairs = solve_gevp(pair, 1);
    CHECK(pairs[0].lambda == doctest::Approx(dispersion_p1(1, 0.25)).epsilon(1e-12));
    CHECK(pairs[0].lambda == doctest::Approx(10.3866).epsilon(1e-4));
  }
  {
    const double h = 1.0 / 64.0;
    const SymmetricPair pair = p1_interval_pair(64, dm, mesh);
    const auto pairs = solve_gevp(pair, 10);
    for (int k = 1; k <= 10; ++k)
      CHECK(std::abs(pairs[k - 1].lambda - dispersion_p1(k, h)) <=
            1e-9 * dispersion_p1(k, h));
  }
}

TEST_CASE("certification invariants hold on every solve") {
  Mesh mesh;
  DofMap dm;
  const SymmetricPair pair = p1_interval_pair(32, dm, mesh);
  const auto pairs = solve_gevp(pair, 6);
  std::vector<double> bx(pair.n_free);
  for (const auto& ep : pairs) {
    CHECK(ep.residual <= 1e-10);
    pair.B.mat_vec(ep.vector.data(), bx.data());
    double nb = 0.0;
    for (int i = 0; i < pair.n_free; ++i) nb += ep.vector[i] * bx[i];
    CHECK(nb == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      pair.B.mat_vec(pairs[j].vector.data(), bx.data());
      double g = 0.0;
      for (int t = 0; t < pair.n_free; ++t) g += pairs[i].vector[t] * bx[t];
      CHECK(std::abs(g) <= 1e-10);
    }
}

TEST_CASE("conforming eigenvalues decrease under refinement and bound from above") {
  const ElementFamily& p2 = ElementFamily::get("p2");
  const double exact1 = M_PI * M_PI;
  double prev = 1e300;
  for (int cells : {4, 8, 16}) {
    const Mesh mesh = interval_mesh(0.0, 1.0, cells);
    const DofMap dm = build_dofmap(mesh, p2, 1);
    const SymmetricPair pair = assemble(mesh, p2, 1, dm);
    const double lam = solve_gevp(pair, 1)[0].lambda;
    CHECK(lam >= exact1);
    CHECK(lam <= prev + 1e-13);
    prev = lam;
  }
}

TEST_CASE("eigenvalue sum matches the trace of the reduced operator") {
  Mesh mesh;
  DofMap dm;
  const SymmetricPair pair = p1_interval_pair(32, dm, mesh);  // 31 DOFs
  const int n = pair.n_free;
  const auto l = cholesky_dense(pair.B.to_dense(), n);
  const auto c = reduce_to_standard(pair.A.to_dense(), l, n);
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += c[i * n + i];
  const auto pairs = solve_gevp(pair, n);
  double sum = 0.0;
  for (const auto& ep : pairs) sum += ep.lambda;
  CHECK(sum == doctest::Approx(trace).epsilon(1e-8));
}

TEST_CASE("shift-invert path agrees with the dense reference") {
  SolveOptions dense, si;
  dense.method = SolveOptions::Method::Dense;
  si.method = SolveOptions::Method::ShiftInvert;

  {
    Mesh mesh;
    DofMap dm;
    const SymmetricPair pair = p1_interval_pair(80, dm, mesh);
    const auto pd = solve_gevp(pair, 5, dense);
    const auto ps = solve_gevp(pair, 5, si);
    for (int i = 0; i < 5; ++i)
      CHECK(ps[i].lambda == doctest::Approx(pd[i].lambda).epsilon(1e-9));
  }
  {
    const Mesh mesh = tri_mesh_from_rect(rect_mesh(12, 12, {0.0, 0.0}, {1.0, 1.0}));
    const ElementFamily& p1 = ElementFamily::get("p1");
    const DofMap dm = build_dofmap(mesh, p1, 1);
    const SymmetricPair pair = assemble(mesh, p1, 1, dm);
    const auto pd = solve_gevp(pair, 4, dense);
    const auto ps = solve_gevp(pair, 4, si);
    for (int i = 0; i < 4; ++i)
      CHECK(ps[i].lambda == doctest::Approx(pd[i].lambda).epsilon(1e-9));
  }
}

TEST_CASE("input validation") {
  Mesh mesh;
  DofMap dm;
  const SymmetricPair pair = p1_interval_pair(8, dm, mesh);
  CHECK_THROWS(solve_gevp(pair, 0));
  CHECK_THROWS(solve_gevp(pair, 100));
  SolveOptions opts;
  opts.method = SolveOptions::Method::Dense;
  opts.dense_limit = 3;
  CHECK_THROWS(solve_gevp(pair, 2, opts));
}

TEST_CASE("discrete eigenpairs satisfy the Galerkin orthogonality surrogate") {
  // |a(u_h, phi_i) - lambda_h (u_h, phi_i)| <= 1e-9 ||A|| ||u_h|| for every
  // free basis function, i.e. the residual rows are small.
  const Mesh mesh = interval_mesh(0.0, 1.0, 24);
  const ElementFamily& p2 = ElementFamily::get("p2");
  const DofMap dm = build_dofmap(mesh, p2, 1);
  const SymmetricPair pair = assemble(mesh, p2, 1, dm);
  const auto pairs = solve_gevp(pair, 3);
  const double anorm = pair.A.frobenius_norm();
  std::vector<double> ax(pair.n_free), bx(pair.n_free);
  for (const auto& ep : pairs) {
    pair.A.mat_vec(ep.vector.data(), ax.data());
    pair.B.mat_vec(ep.vector.data(), bx.data());
    for (int i = 0; i < pair.n_free; ++i)
      CHECK(std::abs(ax[i] - ep.lambda * bx[i]) <= 1e-9 * anorm);
  }
}
