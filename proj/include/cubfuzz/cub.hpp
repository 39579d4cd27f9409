#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "cubfuzz/rating.hpp"

namespace cubfuzz {

/// Parameters of the baseline two-component mixture: pi weighs the shifted
/// Binomial (feeling) component, 1 - pi the discrete Uniform.
struct CubParams {
  double pi;  ///< in (0,1]; pi = 0 accepted for pmf evaluation only
  double xi;  ///< feeling parameter, in [0,1]
};

/// Parameters of the mixture with a degenerate (shelter) component at
/// category c. delta weighs the shelter, pi_star splits the remainder
/// between Binomial and Uniform.
struct CubShelterParams {
  double pi_star;  ///< in (0,1]
  double xi;       ///< in [0,1]
  double delta;    ///< in [0,1)
  int c;           ///< shelter category, in 1..m

  /// Equivalent-parameterization weight of the Binomial component.
  double pi1() const { return pi_star * (1.0 - delta); }
  /// Equivalent-parameterization weight of the Uniform component.
  double pi2() const { return (1.0 - pi_star) * (1.0 - delta); }
};

/// Shifted Binomial pmf b_r(xi) = C(m-1, r-1) xi^(m-r) (1-xi)^(r-1) with the
/// convention 0^0 = 1 at the boundaries xi in {0,1}.
double shifted_binomial(int m, double xi, int r);

/// P(R = r) = pi b_r(xi) + (1 - pi)/m.
double cub_pmf(const CubParams& params, int m, int r);

/// P(R = r) = delta [r==c] + (1-delta)(pi_star b_r(xi) + (1-pi_star)/m).
double cub_shelter_pmf(const CubShelterParams& params, int m, int r);

/// Full pmf tables over r = 1..m.
std::vector<double> cub_pmf_table(const CubParams& params, int m);
std::vector<double> cub_shelter_pmf_table(const CubShelterParams& params, int m);

/// Observed-data log-likelihood. Throws std::domain_error naming the
/// category if an observed category has zero probability.
double loglik(const RatingSample& sample, const CubParams& params);
double loglik(const RatingSample& sample, const CubShelterParams& params);

struct FitOptions {
  int max_iter = 1000;
  double tol = 1e-8;       ///< stop when |dll| / (1 + |ll|) < tol
  bool compute_std_errors = true;
  bool allow_boundary = false;  ///< accept degenerate (all-identical) samples
};

/// Result of an EM fit; params holds CubParams or CubShelterParams.
struct CubFit {
  std::variant<CubParams, CubShelterParams> params;
  double loglik = 0.0;
  int n_iter = 0;
  bool converged = false;
  bool boundary = false;   ///< some parameter ended at a clamp bound
  double bic = 0.0;        ///< -2 loglik + k ln(n)
  long n = 0;              ///< sample size the fit was computed on
  std::vector<double> std_errors;    ///< (pi, xi) or (pi_star, xi, delta); empty at boundary
  std::vector<double> loglik_trace;  ///< log-likelihood after each iteration

  bool has_shelter() const { return std::holds_alternative<CubShelterParams>(params); }
  const CubParams& base() const { return std::get<CubParams>(params); }
  const CubShelterParams& shelter() const { return std::get<CubShelterParams>(params); }
  /// Weight of the deliberate (Binomial) component: pi for the baseline
  /// model, pi_star (1 - delta) with shelter; 1 - pi1() is the overall
  /// uncertainty measure.
  double pi1() const;
};

/// Maximum-likelihood fit of the baseline model by EM.
CubFit fit_cub(const RatingSample& sample, const FitOptions& opts = {});

/// Three-component EM with the shelter fixed at category c.
CubFit fit_cub_shelter(const RatingSample& sample, int c, const FitOptions& opts = {});

/// Fits every shelter category and returns the best-BIC fit (ties broken by
/// smaller c).
CubFit fit_cub_shelter_auto(const RatingSample& sample, const FitOptions& opts = {});

struct LrTest {
  double statistic;
  double p_value;
};

/// Likelihood ratio test of the shelter model against the nested baseline;
/// the statistic is referred to a chi-squared law with 1 degree of freedom.
/// Throws std::runtime_error if the statistic is below -1e-6.
LrTest lr_test(const CubFit& base_fit, const CubFit& shelter_fit, long n);

/// Upper tail of the chi-squared distribution with 1 degree of freedom.
double chi2_sf_1df(double x);

/// Standard errors as square roots of the diagonal of the inverse observed
/// information, with the information obtained by central finite differences
/// of the log-likelihood. Throws std::runtime_error for boundary fits or a
/// non-positive-definite information matrix.
std::vector<double> std_errors(const CubFit& fit, const RatingSample& sample);

/// Full inverse-information covariance matrix, row-major k x k with
/// k = 2 (pi, xi) or k = 3 (pi_star, xi, delta).
std::vector<double> information_covariance(const CubFit& fit, const RatingSample& sample);

/// Delta-method standard errors for the equivalent-parameterization weights
/// (pi1, pi2) of a shelter fit.
struct ShelterDerivedSe {
  double pi1;
  double pi2;
};
ShelterDerivedSe shelter_derived_std_errors(const CubFit& fit, const RatingSample& sample);

/// i.i.d. draws by inverse-CDF over the pmf; deterministic for a fixed seed.
RatingSample simulate(const CubParams& params, int m, long n, std::uint64_t seed);
RatingSample simulate(const CubShelterParams& params, int m, long n, std::uint64_t seed);

}  // namespace cubfuzz
