#include "doctest.h"

#include "eigenrate/quadrature.hpp"

#include <cmath>

using namespace eigenrate;

TEST_CASE("single-point Gauss rule is the midpoint rule") {
  const QuadratureRule r = gauss_legendre(1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0][0] == 0.0);
  CHECK(r.weights[0] == doctest::Approx(2.0).epsilon(1e-16));
}

TEST_CASE("two-point Gauss nodes are +-1/sqrt(3)") {
  const QuadratureRule r = gauss_legendre(2);
  REQUIRE(r.size() == 2);
  CHECK(r.points[0][0] == doctest::Approx(-0.5773502691896258).epsilon(1e-15));
  CHECK(r.points[1][0] == doctest::Approx(0.5773502691896258).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gauss rules integrate monomials exactly up to the declared degree") {
  for (int npts = 1; npts <= 20; ++npts) {
    const QuadratureRule r = gauss_legendre(npts);
    CHECK(r.exact_degree == 2 * npts - 1);
    CHECK(r.weight_sum() == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= r.exact_degree; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.points[i][0], k);
      const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
      CHECK(std::abs(q - exact) <= 1e-13 * std::max(1.0, std::abs(exact)));
    }
  }
  CHECK_THROWS(gauss_legendre(0));
  CHECK_THROWS(gauss_legendre(21));
}

TEST_CASE("five-point rule annihilates x^9 by symmetry") {
  const QuadratureRule r = gauss_legendre(5);
  double q = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.points[i][0], 9);
  CHECK(std::abs(q) <= 1e-15);
}

TEST_CASE("tensor rules integrate separable monomials") {
  const QuadratureRule g2 = gauss_legendre(2);
  const QuadratureRule r = tensor_rule(g2, g2);
  CHECK(r.weight_sum() == doctest::Approx(4.0).epsilon(1e-14));

  auto integrate = [&](int a, int b) {
    double q = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      q += r.weights[i] * std::pow(r.points[i][0], a) * std::pow(r.points[i][1], b);
    return q;
  };
  CHECK(std::abs(integrate(3, 3)) <= 1e-15);
  CHECK(integrate(2, 2) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("triangle rules match closed-form moments") {
  auto moment = [](int a, int b) {
    double v = 1.0;
    for (int k = 1; k <= a; ++k) v *= k;
    for (int k = 1; k <= b; ++k) v *= k;
    for (int k = 1; k <= a + b + 2; ++k) v /= k;
    return v;
  };
  for (int degree = 0; degree <= 10; ++degree) {
    const QuadratureRule r = triangle_rule(degree);
    CHECK(r.weight_sum() == doctest::Approx(0.5).epsilon(1e-14));
    for (double w : r.weights) CHECK(w > 0.0);
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double q = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
          q += r.weights[i] * std::pow(r.points[i][0], a) * std::pow(r.points[i][1], b);
        CHECK(std::abs(q - moment(a, b)) <= 1e-13 * std::max(1.0, moment(a, b)));
      }
  }
  CHECK_THROWS(triangle_rule(11));
}

TEST_CASE("degree-1 triangle rule is the centroid rule") {
  const QuadratureRule r = triangle_rule(1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(r.points[0][1] == doctest::Approx(1.0 / 3.0));
  CHECK(r.weights[0] == doctest::Approx(0.5));
}

TEST_CASE("degree-2 triangle rule sits on the edge midpoints") {
  const QuadratureRule r = triangle_rule(2);
  REQUIRE(r.size() == 3);
  for (double w : r.weights) CHECK(w == doctest::Approx(1.0 / 6.0));
  double q = 0.0;  // int over T of x*y = 1/24
  for (std::size_t i = 0; i < r.size(); ++i)
    q += r.weights[i] * r.points[i][0] * r.points[i][1];
  CHECK(q == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}
