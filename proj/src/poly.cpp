#include "eigenrate/poly.hpp"

#include <algorithm>
#include <cmath>

namespace eigenrate {

double Poly::eval(const Point& x) const {
  double s = 0.0;
  for (const auto& [m, c] : coef) {
    double t = c;
    for (int d = 0; d < n; ++d)
      for (int k = 0; k < m.a[d]; ++k) t *= x[d];
    s += t;
  }
  return s;
}

Poly Poly::derivative(const MultiIndex& gamma) const {
  require(gamma.n == n, "Poly::derivative: dimension mismatch");
  Poly out = Poly::zero(n);
  for (const auto& [m, c] : coef) {
    bool alive = true;
    double factor = 1.0;
    MultiIndex dm = m;
    for (int d = 0; d < n; ++d) {
      if (m.a[d] < gamma.a[d]) {
        alive = false;
        break;
      }
      for (int k = 0; k < gamma.a[d]; ++k) factor *= double(m.a[d] - k);
      dm.a[d] = m.a[d] - gamma.a[d];
    }
    if (alive) out.coef[dm] += factor * c;
  }
  return out;
}

Poly Poly::laplacian() const {
  Poly out = derivative(n == 1 ? MultiIndex(2) : MultiIndex(2, 0));
  if (n == 2) out.axpy(1.0, derivative(MultiIndex(0, 2)));
  return out;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& [m, c] : coef)
    if (c != 0.0) d = std::max(d, m.order());
  return d;
}

double Poly::max_abs_coef() const {
  double v = 0.0;
  for (const auto& [m, c] : coef) v = std::max(v, std::abs(c));
  return v;
}

Poly& Poly::axpy(double s, const Poly& q) {
  require(q.n == n, "Poly::axpy: dimension mismatch");
  for (const auto& [m, c] : q.coef) coef[m] += s * c;
  return *this;
}

Poly& Poly::scale(double s) {
  for (auto& [m, c] : coef) c *= s;
  return *this;
}

Poly legendre_1d(int k) {
  require(k >= 0, "legendre_1d: negative degree");
  // Bonnet recurrence on coefficient arrays.
  std::vector<std::vector<double>> c(k + 1);
  c[0] = {1.0};
  if (k >= 1) c[1] = {0.0, 1.0};
  for (int m = 1; m < k; ++m) {
    std::vector<double> next(m + 2, 0.0);
    for (int i = 0; i <= m; ++i) next[i + 1] += (2.0 * m + 1.0) / (m + 1.0) * c[m][i];
    for (int i = 0; i < int(c[m - 1].size()); ++i) next[i] -= double(m) / (m + 1.0) * c[m - 1][i];
    c[m + 1] = next;
  }
  Poly p = Poly::zero(1);
  for (int i = 0; i <= k; ++i)
    if (c[k][i] != 0.0) p.coef[MultiIndex(i)] = c[k][i];
  return p;
}

Poly legendre_product(const MultiIndex& a) {
  if (a.n == 1) return legendre_1d(a.a[0]);
  const Poly px = legendre_1d(a.a[0]);
  const Poly py = legendre_1d(a.a[1]);
  Poly out = Poly::zero(2);
  for (const auto& [mx, cx] : px.coef)
    for (const auto& [my, cy] : py.coef) out.coef[MultiIndex(mx.a[0], my.a[0])] += cx * cy;
  return out;
}

bool annihilation_check(const std::vector<Poly>& span, int m, int r) {
  require(m >= 1 && r >= 1, "annihilation_check: need m >= 1, r >= 1");
  require(r % m == 0, "annihilation_check: r not decomposable as m*i + 2*m*l");
  const int t = r / m;
  const int i = t % 2;       // gradient exponent selector
  const int l = (t - i) / 2; // Laplacian power is m*l
  require(!span.empty(), "annihilation_check: empty span");
  const int n = span.front().n;

  for (const auto& p : span) {
    const double scale = std::max(p.max_abs_coef(), 1.0);
    Poly q = p;
    for (int k = 0; k < m * l; ++k) q = q.laplacian();
    if (i == 0) {
      if (!q.is_zero(1e-12 * scale)) return false;
    } else if (n == 1) {
      if (!q.derivative(MultiIndex(m)).is_zero(1e-12 * scale)) return false;
    } else {
      // All components of the m-th gradient tensor must vanish.
      for (int b0 = 0; b0 <= m; ++b0)
        if (!q.derivative(MultiIndex(b0, m - b0)).is_zero(1e-12 * scale)) return false;
    }
  }
  return true;
}

}  // namespace eigenrate
