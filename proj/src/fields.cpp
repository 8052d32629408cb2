#include "eigenrate/fields.hpp"

#include <cmath>

namespace eigenrate {

namespace {

// d^a/dt^a sin(w t) = w^a sin(w t + a pi/2)
double sine_deriv(double w, double t, int a) {
  double v = std::sin(w * t + 0.5 * M_PI * a);
  return std::pow(w, a) * v;
}

}  // namespace

double SineMode1D::eval(const Point& x, const MultiIndex& d) const {
  require(d.n == 1, "SineMode1D: derivative dimension mismatch");
  return amp_ * sine_deriv(k_ * M_PI, x[0], d.a[0]);
}

double SineMode2D::eval(const Point& x, const MultiIndex& d) const {
  require(d.n == 2, "SineMode2D: derivative dimension mismatch");
  return amp_ * sine_deriv(k_ * M_PI, x[0], d.a[0]) * sine_deriv(l_ * M_PI, x[1], d.a[1]);
}

}  // namespace eigenrate
