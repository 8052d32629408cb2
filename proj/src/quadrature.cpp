#include "eigenrate/quadrature.hpp"

#include <cmath>

namespace eigenrate {

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

// Legendre value and derivative by the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

double triangle_moment(int a, int b) {
  // int_T x^a y^b = a! b! / (a+b+2)!
  double v = 1.0;
  for (int k = 1; k <= a; ++k) v *= k;
  for (int k = 1; k <= b; ++k) v *= k;
  for (int k = 1; k <= a + b + 2; ++k) v /= k;
  return v;
}

void verify_triangle_exactness(const QuadratureRule& rule) {
  for (int a = 0; a + 0 <= rule.exact_degree; ++a) {
    for (int b = 0; a + b <= rule.exact_degree; ++b) {
      double q = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i)
        q += rule.weights[i] * std::pow(rule.points[i][0], a) * std::pow(rule.points[i][1], b);
      const double exact = triangle_moment(a, b);
      ensure(std::abs(q - exact) <= 1e-13 * std::max(1.0, std::abs(exact)),
             "triangle_rule: moment verification failed");
    }
  }
}

}  // namespace

QuadratureRule gauss_legendre(int npts) {
  require(npts >= 1 && npts <= 20, "gauss_legendre: npts out of range [1,20]");
  QuadratureRule rule;
  rule.exact_degree = 2 * npts - 1;
  rule.points.resize(npts);
  rule.weights.resize(npts);

  const int mid = (npts + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    // Chebyshev-based initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (npts + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre_eval(npts, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    legendre_eval(npts, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = {-x, 0.0};
    rule.points[npts - 1 - i] = {x, 0.0};
    rule.weights[i] = w;
    rule.weights[npts - 1 - i] = w;
  }
  if (npts % 2 == 1) rule.points[npts / 2] = {0.0, 0.0};  // enforce exact symmetry
  return rule;
}

QuadratureRule tensor_rule(const QuadratureRule& rx, const QuadratureRule& ry) {
  QuadratureRule rule;
  rule.exact_degree = std::min(rx.exact_degree, ry.exact_degree);
  for (std::size_t j = 0; j < ry.size(); ++j)
    for (std::size_t i = 0; i < rx.size(); ++i) {
      rule.points.push_back({rx.points[i][0], ry.points[j][0]});
      rule.weights.push_back(rx.weights[i] * ry.weights[j]);
    }
  return rule;
}

QuadratureRule triangle_rule(int degree) {
  require(degree >= 0 && degree <= 10, "triangle_rule: unsupported degree");
  QuadratureRule rule;
  rule.exact_degree = degree;

  if (degree <= 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {0.5};
  } else if (degree == 2) {
    rule.points = {{0.5, 0.0}, {0.5, 0.5}, {0.0, 0.5}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  } else {
    // Collapsed tensor rule: x = u, y = v (1-u) with Jacobian (1-u). The
    // substituted integrand of a degree-d monomial has degree d+1 in u and
    // d in v, so Gauss counts below are exact; all weights stay positive.
    const int nu = (degree + 3) / 2;
    const int nv = (degree + 2) / 2;
    const QuadratureRule gu = gauss_legendre(nu);
    const QuadratureRule gv = gauss_legendre(nv);
    for (int i = 0; i < nu; ++i) {
      const double u = 0.5 * (gu.points[i][0] + 1.0);
      const double wu = 0.5 * gu.weights[i];
      for (int j = 0; j < nv; ++j) {
        const double v = 0.5 * (gv.points[j][0] + 1.0);
        const double wv = 0.5 * gv.weights[j];
        rule.points.push_back({u, v * (1.0 - u)});
        rule.weights.push_back(wu * wv * (1.0 - u));
      }
    }
  }
  verify_triangle_exactness(rule);
  return rule;
}

}  // namespace eigenrate
