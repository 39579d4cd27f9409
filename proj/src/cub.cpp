#include "cubfuzz/cub.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cubfuzz {

namespace {

constexpr double kClampLo = 1e-6;
constexpr double kClampHi = 1.0 - 1e-6;
// Parameters within this distance of a clamp mark the fit as boundary.
constexpr double kBoundaryMargin = 1e-5;
// Central-difference step for the observed information; standard errors
// require estimates at least 2h away from the clamps.
constexpr double kFdStep = 1e-4;
constexpr double kSeInteriorMargin = 2.0 * kFdStep;

double clamp_unit(double x) { return std::min(std::max(x, kClampLo), kClampHi); }

bool near_boundary(double x) { return x <= kClampLo + kBoundaryMargin || x >= kClampHi - kBoundaryMargin; }

// C(n, k) computed over the shorter side so that mirrored categories get
// bitwise-identical coefficients; exact while intermediates stay below 2^53.
double binom_coef(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c *= static_cast<double>(n - k + i);
    c /= static_cast<double>(i);
  }
  return c;
}

void check_category(int r, int m, const char* what) {
  if (r < 1 || r > m)
    throw std::out_of_range(std::string(what) + " " + std::to_string(r) + " outside 1.." +
                            std::to_string(m));
}

void check_unit(double x, const char* name, double lo = 0.0, double hi = 1.0) {
  if (!(x >= lo && x <= hi))
    throw std::invalid_argument(std::string(name) + "=" + std::to_string(x) + " outside [" +
                                std::to_string(lo) + "," + std::to_string(hi) + "]");
}

double freq_loglik(const RatingSample& sample, const std::vector<double>& pmf) {
  double ll = 0.0;
  for (int r = 1; r <= sample.m; ++r) {
    const long f = sample.freq[static_cast<size_t>(r) - 1];
    if (f == 0) continue;
    const double p = pmf[static_cast<size_t>(r) - 1];
    if (!(p > 0.0))
      throw std::domain_error("observed category " + std::to_string(r) +
                              " has zero probability under the supplied parameters");
    ll += static_cast<double>(f) * std::log(p);
  }
  return ll;
}

void check_sample_for_fit(const RatingSample& sample, const FitOptions& opts) {
  if (sample.n < 2) throw std::invalid_argument("need at least 2 observations to fit");
  if (!opts.allow_boundary) {
    const long top = *std::max_element(sample.freq.begin(), sample.freq.end());
    if (top == sample.n)
      throw std::invalid_argument(
          "all ratings identical; degenerate sample gives a boundary fit (set allow_boundary)");
  }
}

double moment_xi_start(const RatingSample& sample) {
  double rbar = 0.0;
  for (int r = 1; r <= sample.m; ++r)
    rbar += static_cast<double>(r) * static_cast<double>(sample.freq[static_cast<size_t>(r) - 1]);
  rbar /= static_cast<double>(sample.n);
  const double xi0 = (sample.m - rbar) / (sample.m - 1);
  return std::min(std::max(xi0, 0.05), 0.95);
}

bool em_converged(double ll_new, double ll_old, double tol) {
  return std::abs(ll_new - ll_old) / (1.0 + std::abs(ll_new)) < tol;
}

double finalize_bic(double ll, int k, long n) {
  return -2.0 * ll + static_cast<double>(k) * std::log(static_cast<double>(n));
}

}  // namespace

double shifted_binomial(int m, double xi, int r) {
  if (m < 5) throw std::invalid_argument("shifted binomial needs m >= 5");
  check_unit(xi, "xi");
  check_category(r, m, "category");
  // pow(0,0) == 1, so the boundary cases xi in {0,1} fall out correctly.
  return binom_coef(m - 1, r - 1) * std::pow(xi, m - r) * std::pow(1.0 - xi, r - 1);
}

double cub_pmf(const CubParams& params, int m, int r) {
  check_unit(params.pi, "pi");
  return params.pi * shifted_binomial(m, params.xi, r) + (1.0 - params.pi) / m;
}

double cub_shelter_pmf(const CubShelterParams& params, int m, int r) {
  check_unit(params.pi_star, "pi_star");
  check_unit(params.delta, "delta");
  check_category(params.c, m, "shelter category");
  check_category(r, m, "category");
  const double base =
      params.pi_star * shifted_binomial(m, params.xi, r) + (1.0 - params.pi_star) / m;
  return params.delta * (r == params.c ? 1.0 : 0.0) + (1.0 - params.delta) * base;
}

std::vector<double> cub_pmf_table(const CubParams& params, int m) {
  std::vector<double> p(static_cast<size_t>(m));
  for (int r = 1; r <= m; ++r) p[static_cast<size_t>(r) - 1] = cub_pmf(params, m, r);
  return p;
}

std::vector<double> cub_shelter_pmf_table(const CubShelterParams& params, int m) {
  std::vector<double> p(static_cast<size_t>(m));
  for (int r = 1; r <= m; ++r) p[static_cast<size_t>(r) - 1] = cub_shelter_pmf(params, m, r);
  return p;
}

double loglik(const RatingSample& sample, const CubParams& params) {
  return freq_loglik(sample, cub_pmf_table(params, sample.m));
}

double loglik(const RatingSample& sample, const CubShelterParams& params) {
  return freq_loglik(sample, cub_shelter_pmf_table(params, sample.m));
}

double CubFit::pi1() const {
  return has_shelter() ? shelter().pi1() : base().pi;
}

CubFit fit_cub(const RatingSample& sample, const FitOptions& opts) {
  check_sample_for_fit(sample, opts);
  const int m = sample.m;
  const double n = static_cast<double>(sample.n);

  CubParams p{0.5, moment_xi_start(sample)};
  double ll = loglik(sample, p);

  CubFit fit;
  fit.n = sample.n;
  fit.loglik_trace.push_back(ll);

  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    const std::vector<double> pmf = cub_pmf_table(p, m);
    double sum_tau = 0.0;
    double sum_tau_r = 0.0;
    for (int r = 1; r <= m; ++r) {
      const double f = static_cast<double>(sample.freq[static_cast<size_t>(r) - 1]);
      if (f == 0.0) continue;
      const double tau = p.pi * shifted_binomial(m, p.xi, r) / pmf[static_cast<size_t>(r) - 1];
      sum_tau += f * tau;
      sum_tau_r += f * tau * r;
    }
    p.pi = clamp_unit(sum_tau / n);
    if (sum_tau > 0.0) {
      const double rbar_tau = sum_tau_r / sum_tau;
      p.xi = clamp_unit((m - rbar_tau) / (m - 1));
    }
    const double ll_new = loglik(sample, p);
    fit.loglik_trace.push_back(ll_new);
    const bool done = em_converged(ll_new, ll, opts.tol);
    ll = ll_new;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.n_iter = std::min(it, opts.max_iter);

  // EM approaches a clamp sublinearly; snapping there is accepted only when
  // it improves the likelihood, so interior fits are never perturbed.
  const CubParams candidates[] = {
      {kClampLo, p.xi}, {kClampHi, p.xi}, {p.pi, kClampLo}, {p.pi, kClampHi}};
  for (const CubParams& cand : candidates) {
    const double ll_cand = loglik(sample, cand);
    if (ll_cand > ll) {
      p = cand;
      ll = ll_cand;
      fit.loglik_trace.push_back(ll);
    }
  }

  fit.params = p;
  fit.loglik = ll;
  fit.boundary = near_boundary(p.pi) || near_boundary(p.xi);
  fit.bic = finalize_bic(ll, 2, sample.n);
  if (opts.compute_std_errors && !fit.boundary) {
    try {
      fit.std_errors = std_errors(fit, sample);
    } catch (const std::runtime_error&) {
      // ill-conditioned information; leave the errors empty
    }
  }
  return fit;
}

CubFit fit_cub_shelter(const RatingSample& sample, int c, const FitOptions& opts) {
  check_sample_for_fit(sample, opts);
  const int m = sample.m;
  check_category(c, m, "shelter category");
  const double n = static_cast<double>(sample.n);

  double xi = moment_xi_start(sample);
  double pi1 = 0.5 * 0.9;  // pi_star = 0.5, delta = 0.1
  double pi2 = 0.5 * 0.9;
  double delta = 0.1;

  auto params_of = [&]() {
    const double one_minus_delta = pi1 + pi2;
    const double pi_star = one_minus_delta > 0.0 ? pi1 / one_minus_delta : 0.5;
    return CubShelterParams{pi_star, xi, delta, c};
  };

  double ll = loglik(sample, params_of());
  CubFit fit;
  fit.n = sample.n;
  fit.loglik_trace.push_back(ll);

  int it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    const std::vector<double> pmf = cub_shelter_pmf_table(params_of(), m);
    double s1 = 0.0, s2 = 0.0, s1_r = 0.0;
    for (int r = 1; r <= m; ++r) {
      const double f = static_cast<double>(sample.freq[static_cast<size_t>(r) - 1]);
      if (f == 0.0) continue;
      const double pr = pmf[static_cast<size_t>(r) - 1];
      const double t1 = pi1 * shifted_binomial(m, xi, r) / pr;
      const double t2 = pi2 / m / pr;
      s1 += f * t1;
      s2 += f * t2;
      s1_r += f * t1 * r;
    }
    double p1n = std::max(s1 / n, kClampLo);
    double p2n = std::max(s2 / n, kClampLo);
    double dn = std::max(1.0 - s1 / n - s2 / n, kClampLo);
    const double tot = p1n + p2n + dn;
    pi1 = p1n / tot;
    pi2 = p2n / tot;
    delta = dn / tot;
    if (s1 > 0.0) {
      const double rbar1 = s1_r / s1;
      xi = clamp_unit((m - rbar1) / (m - 1));
    }
    const double ll_new = loglik(sample, params_of());
    fit.loglik_trace.push_back(ll_new);
    const bool done = em_converged(ll_new, ll, opts.tol);
    ll = ll_new;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.n_iter = std::min(it, opts.max_iter);

  CubShelterParams p = params_of();

  // The shelter family nests the plain mixture at delta = 0, yet EM creeps
  // toward that face sublinearly and can stop short of the nested optimum.
  // Polish against the nested fit and the delta faces; a candidate is
  // adopted only when it strictly improves the likelihood, so interior
  // solutions are never perturbed. All candidates keep every category
  // probability positive, hence evaluate to a finite log-likelihood.
  {
    FitOptions nested_opts = opts;
    nested_opts.compute_std_errors = false;
    nested_opts.allow_boundary = true;
    const CubFit nested = fit_cub(sample, nested_opts);
    const CubShelterParams candidates[] = {
        {nested.base().pi, nested.base().xi, 0.0, c},
        {p.pi_star, p.xi, 0.0, c},
        {p.pi_star, p.xi, kClampHi, c}};
    for (const CubShelterParams& cand : candidates) {
      const double ll_cand = loglik(sample, cand);
      if (ll_cand > ll) {
        p = cand;
        ll = ll_cand;
        fit.loglik_trace.push_back(ll);
      }
    }
  }

  fit.params = p;
  fit.loglik = ll;
  fit.boundary = near_boundary(p.pi1()) || near_boundary(p.pi2()) || near_boundary(p.delta) ||
                 near_boundary(p.pi_star) || near_boundary(p.xi);
  fit.bic = finalize_bic(ll, 3, sample.n);
  if (opts.compute_std_errors && !fit.boundary) {
    try {
      fit.std_errors = std_errors(fit, sample);
    } catch (const std::runtime_error&) {
    }
  }
  return fit;
}

CubFit fit_cub_shelter_auto(const RatingSample& sample, const FitOptions& opts) {
  CubFit best;
  bool have = false;
  for (int c = 1; c <= sample.m; ++c) {
    CubFit fit = fit_cub_shelter(sample, c, opts);
    if (!have || fit.bic < best.bic) {  // strict: ties keep the smaller c
      best = std::move(fit);
      have = true;
    }
  }
  return best;
}

double chi2_sf_1df(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

LrTest lr_test(const CubFit& base_fit, const CubFit& shelter_fit, long n) {
  if (base_fit.has_shelter() || !shelter_fit.has_shelter())
    throw std::invalid_argument("lr_test expects (baseline fit, shelter fit)");
  if (base_fit.n != n || shelter_fit.n != n)
    throw std::invalid_argument("lr_test fits come from samples of different size");
  double stat = 2.0 * (shelter_fit.loglik - base_fit.loglik);
  if (stat < -1e-6)
    throw std::runtime_error("negative likelihood-ratio statistic (" + std::to_string(stat) +
                             "); shelter EM did not reach the baseline optimum");
  stat = std::max(stat, 0.0);
  return LrTest{stat, chi2_sf_1df(stat)};
}

namespace {

// Log-likelihood as a function of the free parameter vector, in the fit's
// own parameterization.
double param_loglik(const CubFit& fit, const RatingSample& sample, const std::vector<double>& th) {
  if (fit.has_shelter())
    return loglik(sample, CubShelterParams{th[0], th[1], th[2], fit.shelter().c});
  return loglik(sample, CubParams{th[0], th[1]});
}

std::vector<double> free_params(const CubFit& fit) {
  if (fit.has_shelter()) {
    const CubShelterParams& s = fit.shelter();
    return {s.pi_star, s.xi, s.delta};
  }
  return {fit.base().pi, fit.base().xi};
}

// Inverts a symmetric positive-definite 2x2 or 3x3 matrix (row-major);
// throws if a leading principal minor is not positive.
std::vector<double> spd_inverse(const std::vector<double>& a, int k) {
  auto fail = []() {
    throw std::runtime_error(
        "observed information is not positive definite; boundary or ill-conditioned fit");
  };
  if (k == 2) {
    const double det = a[0] * a[3] - a[1] * a[2];
    if (!(a[0] > 0.0) || !(det > 0.0)) fail();
    return {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};
  }
  const double m1 = a[0];
  const double m2 = a[0] * a[4] - a[1] * a[3];
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(det > 0.0)) fail();
  std::vector<double> inv(9);
  inv[0] = (a[4] * a[8] - a[5] * a[7]) / det;
  inv[1] = (a[2] * a[7] - a[1] * a[8]) / det;
  inv[2] = (a[1] * a[5] - a[2] * a[4]) / det;
  inv[3] = (a[5] * a[6] - a[3] * a[8]) / det;
  inv[4] = (a[0] * a[8] - a[2] * a[6]) / det;
  inv[5] = (a[2] * a[3] - a[0] * a[5]) / det;
  inv[6] = (a[3] * a[7] - a[4] * a[6]) / det;
  inv[7] = (a[1] * a[6] - a[0] * a[7]) / det;
  inv[8] = (a[0] * a[4] - a[1] * a[3]) / det;
  return inv;
}

}  // namespace

std::vector<double> information_covariance(const CubFit& fit, const RatingSample& sample) {
  const std::vector<double> th = free_params(fit);
  const int k = static_cast<int>(th.size());
  for (double t : th)
    if (t < kSeInteriorMargin || t > 1.0 - kSeInteriorMargin)
      throw std::runtime_error("standard errors undefined for a boundary fit");

  const double h = kFdStep;
  auto ll_at = [&](std::vector<double> v) { return param_loglik(fit, sample, v); };
  const double f0 = ll_at(th);

  std::vector<double> hess(static_cast<size_t>(k * k), 0.0);
  for (int i = 0; i < k; ++i) {
    std::vector<double> up = th, dn = th;
    up[static_cast<size_t>(i)] += h;
    dn[static_cast<size_t>(i)] -= h;
    hess[static_cast<size_t>(i * k + i)] = (ll_at(up) - 2.0 * f0 + ll_at(dn)) / (h * h);
    for (int j = i + 1; j < k; ++j) {
      std::vector<double> pp = th, pm = th, mp = th, mm = th;
      pp[static_cast<size_t>(i)] += h;
      pp[static_cast<size_t>(j)] += h;
      pm[static_cast<size_t>(i)] += h;
      pm[static_cast<size_t>(j)] -= h;
      mp[static_cast<size_t>(i)] -= h;
      mp[static_cast<size_t>(j)] += h;
      mm[static_cast<size_t>(i)] -= h;
      mm[static_cast<size_t>(j)] -= h;
      const double hij = (ll_at(pp) - ll_at(pm) - ll_at(mp) + ll_at(mm)) / (4.0 * h * h);
      hess[static_cast<size_t>(i * k + j)] = hij;
      hess[static_cast<size_t>(j * k + i)] = hij;
    }
  }
  std::vector<double> info(hess.size());
  for (size_t i = 0; i < hess.size(); ++i) info[i] = -hess[i];
  return spd_inverse(info, k);
}

std::vector<double> std_errors(const CubFit& fit, const RatingSample& sample) {
  const std::vector<double> cov = information_covariance(fit, sample);
  const int k = fit.has_shelter() ? 3 : 2;
  std::vector<double> se(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double v = cov[static_cast<size_t>(i * k + i)];
    if (!(v > 0.0))
      throw std::runtime_error("non-positive variance from the inverse information");
    se[static_cast<size_t>(i)] = std::sqrt(v);
  }
  return se;
}

ShelterDerivedSe shelter_derived_std_errors(const CubFit& fit, const RatingSample& sample) {
  if (!fit.has_shelter())
    throw std::invalid_argument("derived standard errors only apply to shelter fits");
  const std::vector<double> cov = information_covariance(fit, sample);
  const CubShelterParams& p = fit.shelter();
  auto quad = [&](double g0, double g1, double g2) {
    const double v = g0 * (cov[0] * g0 + cov[1] * g1 + cov[2] * g2) +
                     g1 * (cov[3] * g0 + cov[4] * g1 + cov[5] * g2) +
                     g2 * (cov[6] * g0 + cov[7] * g1 + cov[8] * g2);
    if (!(v > 0.0)) throw std::runtime_error("non-positive delta-method variance");
    return std::sqrt(v);
  };
  // pi1 = pi_star (1 - delta), pi2 = (1 - pi_star)(1 - delta)
  return ShelterDerivedSe{quad(1.0 - p.delta, 0.0, -p.pi_star),
                          quad(-(1.0 - p.delta), 0.0, -(1.0 - p.pi_star))};
}

namespace {

// Uniform double in [0,1) from the top 53 bits; keeps simulation output
// independent of the standard library's distribution implementation.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RatingSample simulate_from_pmf(const std::vector<double>& pmf, int m, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need n >= 1 draws");
  std::vector<double> cdf(pmf.size());
  double cum = 0.0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    cum += pmf[i];
    cdf[i] = cum;
  }
  cdf.back() = 1.0;

  std::mt19937_64 rng(seed);
  RatingSample s;
  s.m = m;
  s.n = n;
  s.ratings.reserve(static_cast<size_t>(n));
  s.freq.assign(static_cast<size_t>(m), 0);
  for (long j = 0; j < n; ++j) {
    const double u = canonical(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int r = static_cast<int>(it - cdf.begin()) + 1;
    s.ratings.push_back(r);
    ++s.freq[static_cast<size_t>(r) - 1];
  }
  return s;
}

}  // namespace

RatingSample simulate(const CubParams& params, int m, long n, std::uint64_t seed) {
  return simulate_from_pmf(cub_pmf_table(params, m), m, n, seed);
}

RatingSample simulate(const CubShelterParams& params, int m, long n, std::uint64_t seed) {
  return simulate_from_pmf(cub_shelter_pmf_table(params, m), m, n, seed);
}

}  // namespace cubfuzz
