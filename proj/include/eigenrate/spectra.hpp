#pragma once

#include "eigenrate/fields.hpp"

#include <memory>
#include <vector>

namespace eigenrate {

/// Closed-form eigenpair with unit L2 norm; degenerate eigenvalues are
/// merged and carry an orthonormal basis of the eigenspace.
struct ExactEigenpair {
  double lambda = 0.0;
  int multiplicity = 1;
  std::vector<std::shared_ptr<const ScalarField>> functions;
  std::vector<std::array<int, 2>> modes;  // (k) or (k,l) labels
};

/// Dirichlet Laplace spectrum on (0,1): lambda_k = (k pi)^2.
std::vector<ExactEigenpair> laplace_interval(int count);

/// Dirichlet Laplace spectrum on the unit square, sorted ascending with
/// degenerate values merged.
std::vector<ExactEigenpair> laplace_square(int count);

/// Clamped-beam spectrum on (0,1): lambda_j = kappa_j^4 with
/// cos(kappa) cosh(kappa) = 1.
std::vector<ExactEigenpair> beam_clamped(int count);

/// j-th root of cos(kappa) cosh(kappa) = 1, found by bisection on the
/// bounded form cos(kappa) - sech(kappa) to 1e-13.
double beam_root(int j);

/// Leading-order growth of the j-th Laplace eigenvalue:
/// 4 pi^2 (j / (omega_n |Omega|))^(2/n).
double weyl_estimate(int j, int n, double volume);

/// Leading-order growth of the j-th eigenvalue of the fourth-order problem:
/// 16 pi^4 (j / (omega_n |Omega|))^(4/n).
double pleijel_estimate(int j, int n, double volume);

/// Unit-ball volume omega_n = pi^(n/2) / Gamma(1 + n/2).
double unit_ball_volume(int n);

/// Spectrum counted with multiplicity, first `count` values.
std::vector<double> flatten_spectrum(const std::vector<ExactEigenpair>& spec, int count);

/// Relative deviation of ||grad^{m i} Delta^{m l} u|| from
/// lambda^l ||grad^{m i} u|| on the interior box [1/4,3/4]^n, where
/// r = m i + 2 m l. Evaluated with composite Gauss quadrature.
double eigen_identity_check(const ScalarField& u, double lambda, int r, int m, int p = 2);

/// Clamped-beam eigenfunction, L2-normalized; derivatives of any order.
/// Internally uses an overflow-safe exponential form.
class BeamMode final : public ScalarField {
 public:
  explicit BeamMode(double kappa);
  int dim() const override { return 1; }
  double eval(const Point& x, const MultiIndex& d) const override;

 private:
  double raw_eval(double x, int order) const;
  double kappa_;
  double t1_, t2_, sigma_;
  double norm_ = 1.0;
};

}  // namespace eigenrate
