#pragma once

#include "eigenrate/poly.hpp"

#include <functional>
#include <memory>

namespace eigenrate {

/// Smooth scalar function with point evaluation of arbitrary partial
/// derivatives, used as projection target and as exact reference solution.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double eval(const Point& x, const MultiIndex& deriv) const = 0;
  double operator()(const Point& x) const {
    return eval(x, dim() == 1 ? MultiIndex(0) : MultiIndex(0, 0));
  }
};

/// Polynomial in global coordinates.
class PolyField final : public ScalarField {
 public:
  explicit PolyField(Poly p) : p_(std::move(p)) {}
  int dim() const override { return p_.n; }
  double eval(const Point& x, const MultiIndex& d) const override {
    return p_.derivative(d).eval(x);
  }

 private:
  Poly p_;
};

/// c * sin(k pi x); derivatives of any order.
class SineMode1D final : public ScalarField {
 public:
  SineMode1D(int k, double amplitude) : k_(k), amp_(amplitude) {}
  int dim() const override { return 1; }
  double eval(const Point& x, const MultiIndex& d) const override;

 private:
  int k_;
  double amp_;
};

/// c * sin(k pi x) sin(l pi y); derivatives of any order.
class SineMode2D final : public ScalarField {
 public:
  SineMode2D(int k, int l, double amplitude) : k_(k), l_(l), amp_(amplitude) {}
  int dim() const override { return 2; }
  double eval(const Point& x, const MultiIndex& d) const override;

 private:
  int k_, l_;
  double amp_;
};

/// Field defined by a callable (test convenience).
class CallableField final : public ScalarField {
 public:
  using Fn = std::function<double(const Point&, const MultiIndex&)>;
  CallableField(int n, Fn f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
  double eval(const Point& x, const MultiIndex& d) const override { return f_(x, d); }

 private:
  int n_;
  Fn f_;
};

}  // namespace eigenrate
