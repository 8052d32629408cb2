#pragma once

#include "eigenrate/multiindex.hpp"

#include <map>
#include <vector>

namespace eigenrate {

/// Polynomial in 1 or 2 variables stored as a monomial coefficient map.
/// The variables are whatever coordinates the owner chose (element-local
/// scaled coordinates for finite element bases).
struct Poly {
  int n = 1;
  std::map<MultiIndex, double> coef;

  static Poly zero(int n) { return Poly{n, {}}; }
  static Poly monomial(const MultiIndex& m, double c = 1.0) {
    Poly p{m.n, {}};
    if (c != 0.0) p.coef[m] = c;
    return p;
  }

  double eval(const Point& x) const;

  /// Exact symbolic derivative D^gamma.
  Poly derivative(const MultiIndex& gamma) const;

  /// Sum of all unmixed second derivatives.
  Poly laplacian() const;

  int degree() const;
  double max_abs_coef() const;
  bool is_zero(double tol = 0.0) const { return max_abs_coef() <= tol; }

  Poly& axpy(double s, const Poly& q);
  Poly& scale(double s);

  friend Poly operator+(Poly p, const Poly& q) { return p.axpy(1.0, q); }
  friend Poly operator-(Poly p, const Poly& q) { return p.axpy(-1.0, q); }
  friend Poly operator*(double s, Poly p) { return p.scale(s); }
};

/// Monomial expansion of the Legendre polynomial P_k on [-1,1].
Poly legendre_1d(int k);

/// Tensor product P_{a0}(x) * P_{a1}(y) (or P_{a0}(x) in 1D).
Poly legendre_product(const MultiIndex& a);

/// True iff grad^{m*i} Delta^{m*l} annihilates every member of `span`,
/// where r = m*i + 2*m*l with i in {0,1}. Computed symbolically.
bool annihilation_check(const std::vector<Poly>& span, int m, int r);

}  // namespace eigenrate
