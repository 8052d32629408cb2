#include "eigenrate/spectra.hpp"

#include "eigenrate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace eigenrate {

namespace {

double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

// Composite Gauss quadrature over the box [1/4,3/4]^n (cells x 10 points per
// direction), applied to |f|^p summed over integrand components.
template <typename F>
double box_lp_norm(int n, double p, F&& integrand) {
  const int cells = 8;
  const QuadratureRule g = gauss_legendre(10);
  const double a = 0.25, b = 0.75;
  const double hc = (b - a) / cells;
  double acc = 0.0;
  if (n == 1) {
    for (int c = 0; c < cells; ++c) {
      const double mid = a + (c + 0.5) * hc;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const Point x{mid + 0.5 * hc * g.points[q][0], 0.0};
        acc += 0.5 * hc * g.weights[q] * integrand(x, p);
      }
    }
  } else {
    for (int cy = 0; cy < cells; ++cy)
      for (int cx = 0; cx < cells; ++cx) {
        const double mx = a + (cx + 0.5) * hc;
        const double my = a + (cy + 0.5) * hc;
        for (std::size_t qy = 0; qy < g.size(); ++qy)
          for (std::size_t qx = 0; qx < g.size(); ++qx) {
            const Point x{mx + 0.5 * hc * g.points[qx][0], my + 0.5 * hc * g.points[qy][0]};
            acc += 0.25 * hc * hc * g.weights[qx] * g.weights[qy] * integrand(x, p);
          }
      }
  }
  return std::pow(acc, 1.0 / p);
}

// Sum over the gradient-tensor components |D^beta v|^p with |beta| = order,
// where v = Delta^{lap} u.
double tensor_component_sum(const ScalarField& u, const Point& x, int lap, int order, double p) {
  const int n = u.dim();
  auto lap_deriv = [&](const MultiIndex& extra) {
    // Delta^lap expanded multinomially: sum over ways to distribute the
    // lap Laplacians between the coordinate directions.
    double s = 0.0;
    if (n == 1) {
      MultiIndex d(extra.a[0] + 2 * lap);
      return u.eval(x, d);
    }
    // binomial expansion of (dxx + dyy)^lap
    double binom = 1.0;
    for (int i = 0; i <= lap; ++i) {
      const MultiIndex d(extra.a[0] + 2 * i, extra.a[1] + 2 * (lap - i));
      s += binom * u.eval(x, d);
      binom = binom * (lap - i) / (i + 1.0);
    }
    return s;
  };
  double acc = 0.0;
  if (n == 1) {
    acc = std::pow(std::abs(lap_deriv(MultiIndex(order))), p);
  } else {
    for (int b0 = 0; b0 <= order; ++b0)
      acc += std::pow(std::abs(lap_deriv(MultiIndex(b0, order - b0))), p);
  }
  return acc;
}

}  // namespace

std::vector<ExactEigenpair> laplace_interval(int count) {
  require(count >= 1, "laplace_interval: count must be positive");
  std::vector<ExactEigenpair> out;
  for (int k = 1; k <= count; ++k) {
    ExactEigenpair ep;
    ep.lambda = double(k) * k * M_PI * M_PI;
    ep.multiplicity = 1;
    ep.functions = {std::make_shared<SineMode1D>(k, std::sqrt(2.0))};
    ep.modes = {{k, 0}};
    out.push_back(std::move(ep));
  }
  return out;
}

std::vector<ExactEigenpair> laplace_square(int count) {
  require(count >= 1, "laplace_square: count must be positive");
  // Enumerate a lattice box large enough that the first `count` distinct
  // values are complete with all their multiplicities.
  const int L = 2 * int(std::ceil(std::sqrt(double(count)))) + 8;
  std::map<long, std::vector<std::array<int, 2>>> by_s;
  for (int k = 1; k <= L; ++k)
    for (int l = 1; l <= L; ++l) by_s[long(k) * k + long(l) * l].push_back({k, l});

  std::vector<ExactEigenpair> out;
  for (const auto& [s, modes] : by_s) {
    if (int(out.size()) == count) break;
    ensure(s <= long(L) * L, "laplace_square: enumeration box too small");
    ExactEigenpair ep;
    ep.lambda = double(s) * M_PI * M_PI;
    ep.multiplicity = int(modes.size());
    for (const auto& kl : modes)
      ep.functions.push_back(std::make_shared<SineMode2D>(kl[0], kl[1], 2.0));
    ep.modes = modes;
    out.push_back(std::move(ep));
  }
  ensure(int(out.size()) == count, "laplace_square: enumeration too short");
  return out;
}

double beam_root(int j) {
  require(j >= 1, "beam_root: index must be positive");
  const double center = (j + 0.5) * M_PI;
  double lo = center - 0.3, hi = center + 0.3;
  auto f = [](double kappa) { return std::cos(kappa) - sech(kappa); };
  double flo = f(lo), fhi = f(hi);
  ensure(flo * fhi < 0.0, "beam_root: bracket does not straddle a root");
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

BeamMode::BeamMode(double kappa) : kappa_(kappa) {
  // u = cosh(kx) - cos(kx) - sigma (sinh(kx) - sin(kx)) rewritten as
  // t1 e^{k(x-1)} + t2 e^{-kx} - cos(kx) + sigma sin(kx) to avoid overflow
  // and the cosh/sinh cancellation near x = 1.
  const double em = std::exp(-kappa);
  const double den = 0.5 * (1.0 - em * em) - std::sin(kappa) * em;  // (sinh k - sin k) e^{-k}
  sigma_ = (0.5 * (1.0 + em * em) - std::cos(kappa) * em) / den;
  const double num = std::cos(kappa) - std::sin(kappa) - em;  // (1 - sigma)(sinh k - sin k) e^{-k}
  t1_ = 0.5 * num / den;
  t2_ = 0.5 * (1.0 + sigma_);

  // L2 normalization on (0,1) by composite Gauss.
  const QuadratureRule g = gauss_legendre(10);
  const int cells = 64;
  double acc = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double mid = (c + 0.5) / cells;
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double x = mid + 0.5 / cells * g.points[q][0];
      const double v = raw_eval(x, 0);
      acc += 0.5 / cells * g.weights[q] * v * v;
    }
  }
  norm_ = 1.0 / std::sqrt(acc);
}

double BeamMode::raw_eval(double x, int order) const {
  const double k = kappa_;
  double kp = 1.0;
  for (int i = 0; i < order; ++i) kp *= k;
  const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
  const double trig_cos = -std::cos(k * x + 0.5 * M_PI * order);
  const double trig_sin = std::sin(k * x + 0.5 * M_PI * order);
  return t1_ * kp * std::exp(k * (x - 1.0)) + t2_ * sgn * kp * std::exp(-k * x) +
         kp * trig_cos + sigma_ * kp * trig_sin;
}

double BeamMode::eval(const Point& x, const MultiIndex& d) const {
  require(d.n == 1, "BeamMode: derivative dimension mismatch");
  return norm_ * raw_eval(x[0], d.a[0]);
}

std::vector<ExactEigenpair> beam_clamped(int count) {
  require(count >= 1, "beam_clamped: count must be positive");
  std::vector<ExactEigenpair> out;
  for (int j = 1; j <= count; ++j) {
    const double kappa = beam_root(j);
    ExactEigenpair ep;
    ep.lambda = kappa * kappa * kappa * kappa;
    ep.multiplicity = 1;
    ep.functions = {std::make_shared<BeamMode>(kappa)};
    ep.modes = {{j, 0}};
    out.push_back(std::move(ep));
  }
  return out;
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(1.0 + 0.5 * n);
}

double weyl_estimate(int j, int n, double volume) {
  require(j >= 1, "weyl_estimate: index must be positive");
  return 4.0 * M_PI * M_PI * std::pow(double(j) / (unit_ball_volume(n) * volume), 2.0 / n);
}

double pleijel_estimate(int j, int n, double volume) {
  require(j >= 1, "pleijel_estimate: index must be positive");
  return 16.0 * std::pow(M_PI, 4) * std::pow(double(j) / (unit_ball_volume(n) * volume), 4.0 / n);
}

std::vector<double> flatten_spectrum(const std::vector<ExactEigenpair>& spec, int count) {
  std::vector<double> out;
  for (const auto& ep : spec) {
    for (int c = 0; c < ep.multiplicity && int(out.size()) < count; ++c) out.push_back(ep.lambda);
    if (int(out.size()) == count) break;
  }
  ensure(int(out.size()) == count, "flatten_spectrum: not enough eigenvalues computed");
  return out;
}

double eigen_identity_check(const ScalarField& u, double lambda, int r, int m, int p) {
  require(m >= 1 && r >= 1 && r % m == 0, "eigen_identity_check: bad (r,m)");
  const int t = r / m;
  const int i = t % 2;
  const int l = (t - i) / 2;
  const int n = u.dim();
  const double pd = double(p);

  const double lhs = box_lp_norm(n, pd, [&](const Point& x, double pp) {
    return tensor_component_sum(u, x, m * l, m * i, pp);
  });
  const double rhs_norm = box_lp_norm(n, pd, [&](const Point& x, double pp) {
    return tensor_component_sum(u, x, 0, m * i, pp);
  });
  const double rhs = std::pow(lambda, double(l)) * rhs_norm;
  return std::abs(lhs - rhs) / rhs;
}

}  // namespace eigenrate
