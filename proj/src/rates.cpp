#include "eigenrate/rates.hpp"

#include <algorithm>
#include <cmath>

namespace eigenrate {

namespace {

bool is_inf(double p) { return p >= NormSpec::INF_P; }

std::vector<MultiIndex> derivative_list(int n, int j_max) {
  std::vector<MultiIndex> out;
  for (int i = 0; i <= j_max; ++i) {
    if (n == 1) {
      out.push_back(MultiIndex(i));
    } else {
      for (int b = 0; b <= i; ++b) out.push_back(MultiIndex(b, i - b));
    }
  }
  return out;
}

// ||u - uh||_{j,p,K}^p (or the max over points/components for p = inf).
double element_norm_pow(const ScalarField& u, const FeFunction& uh, int elem,
                        const std::vector<MultiIndex>& derivs, double p) {
  const Mesh& mesh = *uh.mesh;
  const LocalPolynomial lp = uh.local_poly(elem);
  const ElementQuadrature eq = oversampled_quadrature(mesh, elem);

  // Pre-differentiate the local polynomial once per derivative.
  std::vector<Poly> dpolys;
  std::vector<double> dscale;
  dpolys.reserve(derivs.size());
  for (const auto& d : derivs) {
    dpolys.push_back(lp.p.derivative(d));
    dscale.push_back(lp.frame.deriv_scale(d));
  }

  double acc = 0.0;
  for (std::size_t q = 0; q < eq.points.size(); ++q) {
    const Point& x = eq.points[q];
    const Point xr = lp.frame.to_ref(x);
    for (std::size_t di = 0; di < derivs.size(); ++di) {
      const double diff = u.eval(x, derivs[di]) - dscale[di] * dpolys[di].eval(xr);
      if (is_inf(p))
        acc = std::max(acc, std::abs(diff));
      else
        acc += eq.weights[q] * std::pow(std::abs(diff), p);
    }
  }
  return acc;
}

RateFit loglog_fit(const std::vector<double>& y, const std::vector<double>& x) {
  RateFit fit;
  fit.points = int(y.size());
  const int n = fit.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (fit.slope * lx[i] + fit.intercept);
    r2 += e * e;
  }
  fit.residual = std::sqrt(r2 / n);
  return fit;
}

}  // namespace

double broken_error(const ScalarField& u, const FeFunction& uh, const NormSpec& spec) {
  require(spec.p >= 1.0, "broken_error: p must be >= 1");
  require(spec.weight == WeightKind::None || !is_inf(spec.p),
          "broken_error: weighted forms need finite p");
  if (spec.weight == WeightKind::Mixed)
    require(spec.q >= spec.p, "broken_error: mixed form needs p <= q");
  const Mesh& mesh = *uh.mesh;
  const int n = mesh.dim;
  const auto derivs = derivative_list(n, spec.j);

  double total = 0.0;
  for (const auto& el : mesh.elements) {
    if (spec.region == Region::InteriorBox && !el.in_G) continue;
    if (is_inf(spec.p)) {
      total = std::max(total, element_norm_pow(u, uh, el.id, derivs, spec.p));
      continue;
    }
    double weight = 1.0;
    double cell;
    if (spec.weight == WeightKind::None) {
      cell = element_norm_pow(u, uh, el.id, derivs, spec.p);
    } else if (spec.weight == WeightKind::LocalPower) {
      cell = element_norm_pow(u, uh, el.id, derivs, spec.p);
      weight = std::pow(el.diam, spec.p * (spec.j - spec.r));
    } else {
      const double inner_pow = element_norm_pow(u, uh, el.id, derivs, spec.q);
      const double inner = is_inf(spec.q) ? inner_pow : std::pow(inner_pow, 1.0 / spec.q);
      cell = std::pow(inner, spec.p);
      const double expo =
          spec.p * ((spec.j - spec.r) + n * (1.0 / spec.p - (is_inf(spec.q) ? 0.0 : 1.0 / spec.q)));
      weight = std::pow(el.diam, expo);
    }
    total += weight * cell;
  }
  return is_inf(spec.p) ? total : std::pow(total, 1.0 / spec.p);
}

MatchResult match_eigenpair(const std::vector<EigenPair>& discrete,
                            const std::vector<ExactEigenpair>& exact, int index) {
  require(index >= 1 && index <= int(exact.size()), "match_eigenpair: index beyond exact window");
  MatchResult mr;
  mr.index = index;
  mr.exact = &exact[index - 1];
  mr.lambda_exact = mr.exact->lambda;
  mr.multiplicity = mr.exact->multiplicity;
  int pos = 0;
  for (int i = 0; i < index - 1; ++i) pos += exact[i].multiplicity;
  require(pos + mr.multiplicity <= int(discrete.size()),
          "match_eigenpair: cluster exceeds the computed discrete window");
  for (int c = 0; c < mr.multiplicity; ++c) {
    mr.discrete_positions.push_back(pos + c);
    mr.discrete_lambdas.push_back(discrete[pos + c].lambda);
  }
  return mr;
}

FeFunction matched_eigenfunction(const MatchResult& match, const std::vector<EigenPair>& discrete,
                                 const Mesh& mesh, const ElementFamily& family,
                                 const DofMap& dofmap, const ScalarField& u_exact,
                                 const NormSpec& spec) {
  FeFunction uh;
  uh.mesh = &mesh;
  uh.family = &family;
  uh.dofmap = &dofmap;

  auto l2_pairing = [&](const FeFunction& v) {
    double s = 0.0;
    for (const auto& el : mesh.elements) {
      const LocalPolynomial lp = v.local_poly(el.id);
      const ElementQuadrature eq = oversampled_quadrature(mesh, el.id);
      for (std::size_t q = 0; q < eq.points.size(); ++q)
        s += eq.weights[q] * u_exact(eq.points[q]) * lp.eval(eq.points[q]);
    }
    return s;
  };

  if (match.multiplicity == 1) {
    uh.coeff = discrete[match.discrete_positions[0]].vector;
    if (l2_pairing(uh) < 0.0)
      for (double& c : uh.coeff) c = -c;
    return uh;
  }

  require(spec.p == 2.0, "matched_eigenfunction: cluster matching needs p = 2");
  const int c = match.multiplicity;
  const auto derivs = derivative_list(mesh.dim, spec.j);

  // Least squares over the cluster span in the (j,2) inner product.
  std::vector<double> gram(c * c, 0.0), rhs(c, 0.0);
  for (const auto& el : mesh.elements) {
    if (spec.region == Region::InteriorBox && !el.in_G) continue;
    const ElementQuadrature eq = oversampled_quadrature(mesh, el.id);
    std::vector<LocalPolynomial> lps;
    for (int i = 0; i < c; ++i) {
      FeFunction vi;
      vi.mesh = &mesh;
      vi.family = &family;
      vi.dofmap = &dofmap;
      vi.coeff = discrete[match.discrete_positions[i]].vector;
      lps.push_back(vi.local_poly(el.id));
    }
    for (std::size_t q = 0; q < eq.points.size(); ++q) {
      const Point& x = eq.points[q];
      for (const auto& d : derivs) {
        const double ud = u_exact.eval(x, d);
        std::vector<double> vd(c);
        for (int i = 0; i < c; ++i) vd[i] = lps[i].eval(x, d);
        for (int i = 0; i < c; ++i) {
          rhs[i] += eq.weights[q] * ud * vd[i];
          for (int k = 0; k < c; ++k) gram[i * c + k] += eq.weights[q] * vd[i] * vd[k];
        }
      }
    }
  }
  // Tiny SPD solve by Cholesky.
  const std::vector<double> l = cholesky_dense(gram, c);
  std::vector<double> sol = rhs;
  for (int i = 0; i < c; ++i) {
    for (int k = 0; k < i; ++k) sol[i] -= l[i * c + k] * sol[k];
    sol[i] /= l[i * c + i];
  }
  for (int i = c - 1; i >= 0; --i) {
    for (int k = i + 1; k < c; ++k) sol[i] -= l[k * c + i] * sol[k];
    sol[i] /= l[i * c + i];
  }

  uh.coeff.assign(dofmap.n_free, 0.0);
  for (int i = 0; i < c; ++i) {
    const auto& v = discrete[match.discrete_positions[i]].vector;
    for (int t = 0; t < dofmap.n_free; ++t) uh.coeff[t] += sol[i] * v[t];
  }
  return uh;
}

RateFit eoc(const std::vector<double>& errors, const std::vector<double>& hs) {
  require(errors.size() == hs.size(), "eoc: length mismatch");
  require(errors.size() >= 3, "eoc: need at least 3 levels");
  for (std::size_t i = 0; i + 1 < hs.size(); ++i)
    require(hs[i] > hs[i + 1], "eoc: hs must be strictly decreasing");
  for (double e : errors)
    require(e > 0.0, "eoc: nonpositive error entry (quadrature noise floor); drop the level");

  RateFit fit = loglog_fit(errors, hs);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    fit.pairwise.push_back(std::log(errors[i] / errors[i + 1]) / std::log(hs[i] / hs[i + 1]));
  return fit;
}

RateFit lambda_scaling(const std::vector<double>& errors, const std::vector<double>& lambdas,
                       double h, double cap) {
  require(errors.size() == lambdas.size(), "lambda_scaling: length mismatch");
  require(errors.size() >= 3, "lambda_scaling: need at least 3 eigenvalues");
  double lmax = 0.0;
  for (double l : lambdas) lmax = std::max(lmax, l);
  require(lmax * h * h <= cap, "lambda_scaling: window violates the lambda*h^2 cap");
  for (double e : errors) require(e > 0.0, "lambda_scaling: nonpositive error entry");
  return loglog_fit(errors, lambdas);
}

double bound_ratio(double error, double h, double lambda, int r, int j, int m) {
  require(m >= 1 && r > j, "bound_ratio: need r > j and m >= 1");
  return error / (std::pow(h, r - j) * std::pow(lambda, double(r) / (2.0 * m)));
}

double rhs_seminorm(const ScalarField& u, const Mesh& mesh, const ElementFamily& family,
                    const MultiIndex& alpha, double p) {
  require(mesh.kind != CellKind::Triangle, "rhs_seminorm: tensor-product meshes only");
  require(p >= 1.0 && !is_inf(p), "rhs_seminorm: finite p only");
  const IndexSplit split = index_sets(family, mesh.kind);
  const int r = split.r;

  std::vector<MultiIndex> gammas = split.rest.members();
  if (mesh.dim == 1) {
    gammas.push_back(MultiIndex(r + 1));
  } else {
    for (int b = 0; b <= r + 1; ++b) gammas.push_back(MultiIndex(b, r + 1 - b));
  }

  double total = 0.0;
  for (const auto& el : mesh.elements) {
    const ElementQuadrature eq = oversampled_quadrature(mesh, el.id);
    for (const auto& g : gammas) {
      double integral = 0.0;
      for (std::size_t q = 0; q < eq.points.size(); ++q)
        integral += eq.weights[q] * std::pow(std::abs(u.eval(eq.points[q], g)), p);
      double w = std::pow(el.hx, p * (g.a[0] - alpha.a[0]));
      if (mesh.dim == 2) w *= std::pow(el.hy, p * (g.a[1] - alpha.a[1]));
      total += w * integral;
    }
  }
  return std::pow(total, 1.0 / p);
}

ReliabilityReport reliability(const std::vector<LevelSpectrum>& levels,
                              const std::vector<double>& exact_flat, double tolerance,
                              bool relative) {
  require(levels.size() >= 3, "reliability: need at least 3 mesh levels");
  require(tolerance > 0.0, "reliability: tolerance must be positive");

  ReliabilityReport rep;
  rep.tolerance = tolerance;
  rep.relative = relative;
  for (const auto& lvl : levels) {
    const int window = int(std::min(lvl.lambdas.size(), exact_flat.size()));
    int jstar = 0;
    for (int j = 0; j < window; ++j) {
      const double err = relative ? (lvl.lambdas[j] - exact_flat[j]) / exact_flat[j]
                                  : (lvl.lambdas[j] - exact_flat[j]);
      if (std::abs(err) <= tolerance)
        jstar = j + 1;
      else
        break;
    }
    rep.n_values.push_back(lvl.n_free);
    rep.jstar.push_back(jstar);
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < rep.jstar.size(); ++i)
    if (rep.jstar[i] > 0) {
      xs.push_back(double(rep.n_values[i]));
      ys.push_back(double(rep.jstar[i]));
    }
  rep.fit_points = int(xs.size());
  if (xs.size() >= 2) {
    const RateFit fit = loglog_fit(ys, xs);
    rep.exponent = fit.slope;
    rep.theta_equiv = 1.0 - fit.slope;
  }
  return rep;
}

}  // namespace eigenrate
