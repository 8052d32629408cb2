#pragma once

#include "eigenrate/fefunction.hpp"
#include "eigenrate/gevp.hpp"
#include "eigenrate/spectra.hpp"

namespace eigenrate {

enum class Region { Omega, InteriorBox };
enum class WeightKind { None, LocalPower, Mixed };

/// Which broken (semi)norm to measure. `weight` selects between the plain
/// broken j-norm, the h_K^{p(j-r)}-weighted local sum, and the mixed form
/// with inner exponent q >= p; `r` feeds the weight exponents.
struct NormSpec {
  int j = 0;
  double p = 2.0;  // use INF_P for the max norm
  Region region = Region::Omega;
  WeightKind weight = WeightKind::None;
  double q = 2.0;
  int r = 0;

  static constexpr double INF_P = 1e300;
};

/// Broken-norm distance between a smooth field and an FE function.
double broken_error(const ScalarField& u, const FeFunction& uh, const NormSpec& spec);

/// Matched exact/discrete eigenvalue data for one distinct exact index
/// (1-based). Degenerate exact values occupy a block of discrete positions.
struct MatchResult {
  int index = 1;
  double lambda_exact = 0.0;
  int multiplicity = 1;
  std::vector<int> discrete_positions;
  std::vector<double> discrete_lambdas;
  const ExactEigenpair* exact = nullptr;
};

MatchResult match_eigenpair(const std::vector<EigenPair>& discrete,
                            const std::vector<ExactEigenpair>& exact, int index);

/// FE eigenfunction aligned with the exact one: sign fixed by a nonnegative
/// L2 pairing for simple eigenvalues; least-squares combination over the
/// discrete cluster span for degenerate ones (p = 2 norms only).
FeFunction matched_eigenfunction(const MatchResult& match, const std::vector<EigenPair>& discrete,
                                 const Mesh& mesh, const ElementFamily& family,
                                 const DofMap& dofmap, const ScalarField& u_exact,
                                 const NormSpec& spec);

/// Log-log least squares fit of an error sequence.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the fit residual in log space
  int points = 0;
  std::vector<double> pairwise;  // successive two-level rates
};

/// Slope of log(error) against log(h); hs strictly decreasing, >= 3 levels,
/// all errors positive (zero errors signal the quadrature noise floor).
RateFit eoc(const std::vector<double>& errors, const std::vector<double>& hs);

/// Slope of log(error) against log(lambda) at a fixed mesh size. The window
/// must stay in the asymptotic regime: max(lambda) * h^2 <= cap.
RateFit lambda_scaling(const std::vector<double>& errors, const std::vector<double>& lambdas,
                       double h, double cap = 0.1);

/// e / (h^{r-j} lambda^{r/(2m)}); bounded below by a positive constant when
/// the lower-bound hypotheses hold.
double bound_ratio(double error, double h, double lambda, int r, int j, int m);

/// Right-hand side of the anisotropic best-approximation bound: the p-th
/// root of sum_K [ sum_{gamma in Ind_{r,rest}} + sum_{|gamma| = r+1} ]
/// h_K^{p(gamma-alpha)} ||D^gamma u||_{0,p,K}^p with per-direction sizes.
double rhs_seminorm(const ScalarField& u, const Mesh& mesh, const ElementFamily& family,
                    const MultiIndex& alpha, double p);

/// One mesh level of a reliability study.
struct LevelSpectrum {
  int n_free = 0;
  double h = 0.0;
  std::vector<double> lambdas;  // ascending discrete eigenvalues
};

struct ReliabilityReport {
  double tolerance = 0.0;
  bool relative = true;
  std::vector<int> n_values;
  std::vector<int> jstar;       // largest leading index meeting the tolerance
  double exponent = 0.0;        // fitted slope of log j* vs log N
  double theta_equiv = 1.0;     // 1 - exponent
  int fit_points = 0;
};

ReliabilityReport reliability(const std::vector<LevelSpectrum>& levels,
                              const std::vector<double>& exact_flat, double tolerance,
                              bool relative);

}  // namespace eigenrate
