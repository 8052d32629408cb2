#include "eigenrate/gevp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eigenrate {

namespace {

double sign_like(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Householder reduction to tridiagonal form with accumulated transforms.
// On exit `a` holds the orthogonal matrix Q (Q^T A Q tridiagonal), d the
// diagonal and e the subdiagonal (e[0] = 0).
void tridiagonalize(std::vector<double>& a, int n, std::vector<double>& d,
                    std::vector<double>& e) {
  auto A = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (int i = n - 1; i >= 1; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
      if (scale == 0.0) {
        e[i] = A(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          A(i, k) /= scale;
          h += A(i, k) * A(i, k);
        }
        double f = A(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        A(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          A(j, i) = A(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
          for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
          e[j] = g / h;
          f += e[j] * A(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = A(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
        }
      }
    } else {
      e[i] = A(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += A(i, k) * A(k, j);
        for (int k = 0; k <= l; ++k) A(k, j) -= g * A(k, i);
      }
    }
    d[i] = A(i, i);
    A(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) A(j, i) = A(i, j) = 0.0;
  }
}

// Implicit-shift QL on a tridiagonal matrix, rotations accumulated into the
// columns of z. 50 sweeps per eigenvalue.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, int n) {
  auto Z = [&](int i, int j) -> double& { return z[std::size_t(i) * n + j]; };
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        ensure(iter++ < 50, "sym_eigen: QL did not converge within 50 sweeps");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = Z(k, i + 1);
            Z(k, i + 1) = s * Z(k, i) + c * f;
            Z(k, i) = c * Z(k, i) - s * f;
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void forward_solve(const std::vector<double>& l, int n, double* x) {
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    for (int k = 0; k < i; ++k) s -= l[std::size_t(i) * n + k] * x[k];
    x[i] = s / l[std::size_t(i) * n + i];
  }
}

void backward_solve_t(const std::vector<double>& l, int n, double* x) {
  // Solves L^T x = b.
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l[std::size_t(k) * n + i] * x[k];
    x[i] = s / l[std::size_t(i) * n + i];
  }
}

// ---------------------------------------------------------------------------
// Banded Cholesky for the shift-invert path.

struct BandChol {
  int n = 0;
  int bw = 0;
  std::vector<double> band;  // band[i*(bw+1) + (j - i + bw)] for j in [i-bw, i]

  double& at(int i, int j) { return band[std::size_t(i) * (bw + 1) + (j - i + bw)]; }
  double get(int i, int j) const { return band[std::size_t(i) * (bw + 1) + (j - i + bw)]; }

  void factor(const SparseSym& a) {
    n = a.n;
    bw = a.bandwidth();
    band.assign(std::size_t(n) * (bw + 1), 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
        if (a.col[k] <= i) at(i, a.col[k]) = a.val[k];
    for (int j = 0; j < n; ++j) {
      double diag = get(j, j);
      const int klo = std::max(0, j - bw);
      for (int k = klo; k < j; ++k) {
        const double v = get(j, k);
        diag -= v * v;
      }
      ensure(diag > 0.0, "band cholesky: matrix not positive definite");
      const double dj = std::sqrt(diag);
      at(j, j) = dj;
      const int imax = std::min(n - 1, j + bw);
      for (int i = j + 1; i <= imax; ++i) {
        double s = (j >= i - bw) ? get(i, j) : 0.0;
        const int lo = std::max({0, i - bw, j - bw});
        for (int k = lo; k < j; ++k) s -= get(i, k) * get(j, k);
        at(i, j) = s / dj;
      }
    }
  }

  void solve(double* x) const {
    for (int i = 0; i < n; ++i) {
      double s = x[i];
      const int lo = std::max(0, i - bw);
      for (int k = lo; k < i; ++k) s -= get(i, k) * x[k];
      x[i] = s / get(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = x[i];
      const int hi = std::min(n - 1, i + bw);
      for (int k = i + 1; k <= hi; ++k) s -= get(k, i) * x[k];
      x[i] = s / get(i, i);
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void certify(const SymmetricPair& pair, std::vector<EigenPair>& out) {
  const int n = pair.n_free;
  const double anorm = pair.A.frobenius_norm();
  std::vector<double> ax(n), bx(n);
  std::vector<std::vector<double>> bvecs(out.size(), std::vector<double>(n));

  for (std::size_t i = 0; i < out.size(); ++i) {
    EigenPair& ep = out[i];
    pair.B.mat_vec(ep.vector.data(), bx.data());
    // Exact B-normalization, then a positive dominant coefficient for a
    // deterministic sign.
    const double bn = std::sqrt(dot(ep.vector, bx));
    ensure(bn > 0.0, "solve_gevp: zero eigenvector");
    double dom = 0.0;
    int domi = 0;
    for (int j = 0; j < n; ++j)
      if (std::abs(ep.vector[j]) > dom) {
        dom = std::abs(ep.vector[j]);
        domi = j;
      }
    const double s = (ep.vector[domi] >= 0.0 ? 1.0 : -1.0) / bn;
    for (int j = 0; j < n; ++j) ep.vector[j] *= s;
    pair.B.mat_vec(ep.vector.data(), bvecs[i].data());

    pair.A.mat_vec(ep.vector.data(), ax.data());
    double r2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double rj = ax[j] - ep.lambda * bvecs[i][j];
      r2 += rj * rj;
    }
    ep.residual = std::sqrt(r2) / anorm;
    ensure(ep.residual <= 1e-10, "solve_gevp: residual certification failed");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = dot(out[i].vector, bvecs[j]);
      const double target = (i == j) ? 1.0 : 0.0;
      ensure(std::abs(g - target) <= 1e-10, "solve_gevp: B-orthonormality certification failed");
    }
}

// Ascending eigenvalues; near-ties ordered by the first dominant coefficient.
void order_pairs(std::vector<EigenPair>& pairs) {
  auto dominant_index = [](const EigenPair& p) {
    double mx = 0.0;
    for (double v : p.vector) mx = std::max(mx, std::abs(v));
    for (std::size_t i = 0; i < p.vector.size(); ++i)
      if (std::abs(p.vector[i]) >= 0.5 * mx) return int(i);
    return 0;
  };
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  for (std::size_t i = 0; i + 1 < pairs.size();) {
    std::size_t j = i + 1;
    const double tol = 1e-12 * std::max(1.0, std::abs(pairs[i].lambda));
    while (j < pairs.size() && std::abs(pairs[j].lambda - pairs[i].lambda) <= tol) ++j;
    if (j - i > 1)
      std::stable_sort(pairs.begin() + i, pairs.begin() + j,
                       [&](const EigenPair& a, const EigenPair& b) {
                         return dominant_index(a) < dominant_index(b);
                       });
    i = j;
  }
}

std::vector<EigenPair> solve_dense(const SymmetricPair& pair, int k) {
  const int n = pair.n_free;
  const std::vector<double> l = cholesky_dense(pair.B.to_dense(), n);
  std::vector<double> c = reduce_to_standard(pair.A.to_dense(), l, n);

  std::vector<double> eigval;
  sym_eigen(c, n, eigval);

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return eigval[a] < eigval[b]; });

  std::vector<EigenPair> out(k);
  for (int i = 0; i < k; ++i) {
    out[i].lambda = eigval[idx[i]];
    out[i].vector.resize(n);
    for (int j = 0; j < n; ++j) out[i].vector[j] = c[std::size_t(j) * n + idx[i]];
    backward_solve_t(l, n, out[i].vector.data());
  }
  return out;
}

std::vector<EigenPair> solve_shift_invert(const SymmetricPair& pair, int k) {
  const int n = pair.n_free;
  BandChol chol;
  chol.factor(pair.A);

  // Deterministic start vector with components in all low modes.
  std::vector<double> v0(n);
  for (int i = 0; i < n; ++i) v0[i] = 1.0 + 0.3 * std::sin(2.3 * i + 0.7);

  const int m_max = std::min(n, std::max(3 * k + 60, 80));
  std::vector<std::vector<double>> V;   // B-orthonormal Lanczos basis
  std::vector<std::vector<double>> BV;  // B * V cached
  std::vector<double> alpha, beta;

  auto push_vector = [&](std::vector<double> v) {
    std::vector<double> bv(n);
    pair.B.mat_vec(v.data(), bv.data());
    V.push_back(std::move(v));
    BV.push_back(std::move(bv));
  };

  {
    std::vector<double> bv(n);
    pair.B.mat_vec(v0.data(), bv.data());
    const double nb = std::sqrt(dot(v0, bv));
    ensure(nb > 0.0, "shift-invert: degenerate start vector");
    for (double& x : v0) x /= nb;
    push_vector(v0);
  }

  for (int j = 0; j < m_max; ++j) {
    // w = A^{-1} B v_j
    std::vector<double> w = BV[j];
    chol.solve(w.data());
    alpha.push_back(dot(w, BV[j]));
    // Full reorthogonalization (twice) keeps the basis B-orthonormal.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < V.size(); ++i) {
        const double g = dot(w, BV[i]);
        for (int t = 0; t < n; ++t) w[t] -= g * V[i][t];
      }
    std::vector<double> bw(n);
    pair.B.mat_vec(w.data(), bw.data());
    const double nb = std::sqrt(std::max(0.0, dot(w, bw)));
    beta.push_back(nb);

    const int m = j + 1;
    const bool breakdown = nb <= 1e-13;
    const bool check_now = breakdown || m == m_max || (m >= std::max(2 * k, 20) && m % 10 == 0);
    if (check_now && m >= k) {
      // Eigen decomposition of the small tridiagonal T.
      std::vector<double> d(alpha.begin(), alpha.end());
      std::vector<double> e(m, 0.0);
      for (int i = 1; i < m; ++i) e[i] = beta[i - 1];
      std::vector<double> z(std::size_t(m) * m, 0.0);
      for (int i = 0; i < m; ++i) z[std::size_t(i) * m + i] = 1.0;
      ql_implicit(d, e, z, m);

      std::vector<int> idx(m);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] > d[b]; });  // theta desc

      std::vector<EigenPair> cand;
      const double anorm = pair.A.frobenius_norm();
      std::vector<double> ax(n), bx(n);
      bool all_ok = true;
      for (int r = 0; r < k; ++r) {
        EigenPair ep;
        ensure(d[idx[r]] > 0.0, "shift-invert: nonpositive Ritz value");
        ep.lambda = 1.0 / d[idx[r]];
        ep.vector.assign(n, 0.0);
        for (int i = 0; i < m; ++i) {
          const double s = z[std::size_t(i) * m + idx[r]];
          for (int t = 0; t < n; ++t) ep.vector[t] += s * V[i][t];
        }
        pair.A.mat_vec(ep.vector.data(), ax.data());
        pair.B.mat_vec(ep.vector.data(), bx.data());
        double r2 = 0.0;
        for (int t = 0; t < n; ++t) {
          const double rt = ax[t] - ep.lambda * bx[t];
          r2 += rt * rt;
        }
        if (std::sqrt(r2) / anorm > 1e-11) all_ok = false;
        cand.push_back(std::move(ep));
      }
      if (all_ok) return cand;
      if (breakdown || m == m_max)
        fail("shift-invert: Lanczos did not certify the requested pairs");
    } else if (breakdown) {
      fail("shift-invert: Krylov breakdown before enough pairs converged");
    }

    if (nb > 1e-13 && m < m_max) {
      for (double& x : w) x /= nb;
      push_vector(std::move(w));
    }
  }
  fail("shift-invert: iteration limit reached");
}

}  // namespace

std::vector<double> cholesky_dense(std::vector<double> b, int n) {
  for (int j = 0; j < n; ++j) {
    double diag = b[std::size_t(j) * n + j];
    for (int k = 0; k < j; ++k) diag -= b[std::size_t(j) * n + k] * b[std::size_t(j) * n + k];
    ensure(diag > 0.0, "cholesky: matrix not symmetric positive definite");
    const double dj = std::sqrt(diag);
    b[std::size_t(j) * n + j] = dj;
    for (int i = j + 1; i < n; ++i) {
      double s = b[std::size_t(i) * n + j];
      for (int k = 0; k < j; ++k) s -= b[std::size_t(i) * n + k] * b[std::size_t(j) * n + k];
      b[std::size_t(i) * n + j] = s / dj;
    }
  }
  // Zero out the strict upper triangle for a clean factor.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) b[std::size_t(i) * n + j] = 0.0;
  return b;
}

std::vector<double> reduce_to_standard(const std::vector<double>& a, const std::vector<double>& l,
                                       int n) {
  // W = L^{-1} A, column by column on A^T = A.
  std::vector<double> w(a);
  std::vector<double> colbuf(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) colbuf[i] = w[std::size_t(i) * n + j];
    forward_solve(l, n, colbuf.data());
    for (int i = 0; i < n; ++i) w[std::size_t(i) * n + j] = colbuf[i];
  }
  // C^T = L^{-1} W^T; transpose in place afterwards and symmetrize.
  std::vector<double> c(std::size_t(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) colbuf[i] = w[std::size_t(j) * n + i];
    forward_solve(l, n, colbuf.data());
    for (int i = 0; i < n; ++i) c[std::size_t(j) * n + i] = colbuf[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double v = 0.5 * (c[std::size_t(i) * n + j] + c[std::size_t(j) * n + i]);
      c[std::size_t(i) * n + j] = c[std::size_t(j) * n + i] = v;
    }
  return c;
}

void sym_eigen(std::vector<double>& a, int n, std::vector<double>& eigval) {
  std::vector<double> e;
  tridiagonalize(a, n, eigval, e);
  ql_implicit(eigval, e, a, n);
}

std::vector<EigenPair> solve_gevp(const SymmetricPair& pair, int k, const SolveOptions& opts) {
  const int n = pair.n_free;
  require(k >= 1 && k <= n, "solve_gevp: k out of range");

  SolveOptions::Method method = opts.method;
  if (method == SolveOptions::Method::Auto)
    method = (n <= opts.iterative_threshold) ? SolveOptions::Method::Dense
                                             : SolveOptions::Method::ShiftInvert;
  std::vector<EigenPair> out;
  if (method == SolveOptions::Method::Dense) {
    require(n <= opts.dense_limit,
            "solve_gevp: free DOF count exceeds the dense limit; enable the iterative path");
    out = solve_dense(pair, k);
  } else {
    out = solve_shift_invert(pair, k);
  }
  order_pairs(out);
  certify(pair, out);
  return out;
}

}  // namespace eigenrate
