#include "cubfuzz/fuzzy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cubfuzz {

double fuzzy_score(const IfsTriple& t) { return t.mu - t.nu; }

double fuzzy_accuracy(const IfsTriple& t) { return t.mu + t.nu; }

namespace {

size_t idx(int r) { return static_cast<size_t>(r) - 1; }

void check_profile_inputs(const Edf& f, const RatingScale& scale) {
  if (f.m() != scale.m)
    throw std::invalid_argument("distribution is over " + std::to_string(f.m()) +
                                " categories but the scale has " + std::to_string(scale.m));
}

}  // namespace

IfsTriple IfsProfile::triple(int r) const {
  if (!has_ifs())
    throw std::logic_error("empirical profiles carry membership only; no (mu, nu, u) triple");
  if (r < 1 || r > scale.m)
    throw std::out_of_range("category " + std::to_string(r) + " outside 1.." +
                            std::to_string(scale.m));
  return IfsTriple{mu_at(r), nu_at(r), u_at(r)};
}

IfsProfile cub_fuzzy_profile(const Edf& f, double pi1_hat, const RatingScale& scale) {
  check_profile_inputs(f, scale);
  if (!(pi1_hat >= 0.0 && pi1_hat <= 1.0))
    throw std::invalid_argument("pi1 estimate outside [0,1]");

  const int m = scale.m;
  const double half = 0.5 * pi1_hat;
  const double lo_den = f.at(scale.ip) - f.at(scale.lb);
  const double hi_den = f.at(scale.ub - 1) - f.at(scale.ip);

  IfsProfile prof{FuzzySystem::cub_fuzzy, scale, {}, {}, {}, false};
  prof.mu.assign(static_cast<size_t>(m), 0.0);
  prof.nu.assign(static_cast<size_t>(m), 0.0);
  prof.u.assign(static_cast<size_t>(m), 0.0);

  for (int r = 1; r <= m; ++r) {
    double mu, nu, u;
    if (r <= scale.lb) {
      mu = 0.0;
      nu = 1.0;
      u = 0.0;
    } else if (r >= scale.ub) {
      mu = 1.0;
      nu = 0.0;
      u = 0.0;
    } else {
      // an empty stretch of the distribution makes the interpolation
      // degenerate; the profile then sits flat at pi1/2 on that side
      double ratio;
      if (r <= scale.ip)
        ratio = lo_den > 0.0 ? (f.at(scale.ip) - f.at(r)) / lo_den : 0.0;
      else
        ratio = hi_den > 0.0 ? -(f.at(r) - f.at(scale.ip)) / hi_den : 0.0;
      mu = half - half * ratio;
      nu = half + half * ratio;
      u = 1.0 - pi1_hat;
    }
    prof.mu[idx(r)] = mu;
    prof.nu[idx(r)] = nu;
    prof.u[idx(r)] = u;
  }
  return prof;
}

IfsProfile spline_profile(const RatingScale& scale, const SplineConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("spline exponent epsilon must be positive");
  if (cfg.theta < 1.0 || cfg.eta < 1.0)
    throw std::invalid_argument("hesitancy exponents theta and eta must be >= 1");
  const int a = cfg.a == 0 ? 1 : cfg.a;
  const int b = cfg.b == 0 ? scale.m - 1 : cfg.b;
  if (a < 1 || a >= scale.ip)
    throw std::invalid_argument("spline knot a must satisfy 1 <= a < ip");
  if (b <= scale.ip || b > scale.m)
    throw std::invalid_argument("spline knot b must satisfy ip < b <= m");

  const int m = scale.m;
  const double width = static_cast<double>(b - a);
  IfsProfile prof{FuzzySystem::spline, scale, {}, {}, {}, false};
  prof.mu.assign(static_cast<size_t>(m), 0.0);
  prof.nu.assign(static_cast<size_t>(m), 0.0);
  prof.u.assign(static_cast<size_t>(m), 0.0);

  for (int r = 1; r <= m; ++r) {
    const double t = 2.0 * std::abs(static_cast<double>(scale.ip - r)) / width;
    const double step = 0.5 * std::pow(t, cfg.epsilon);
    double mu = r <= scale.ip ? 0.5 - step : 0.5 + step;
    mu = std::min(std::max(mu, 0.0), 1.0);  // clamp before deriving u
    const double u = std::pow(mu, cfg.theta) * std::pow(1.0 - mu, cfg.eta);
    prof.mu[idx(r)] = mu;
    prof.u[idx(r)] = u;
    prof.nu[idx(r)] = 1.0 - mu - u;
  }
  return prof;
}

IfsProfile empirical_profile(const Edf& f, const RatingScale& scale) {
  check_profile_inputs(f, scale);
  const int m = scale.m;

  IfsProfile prof{FuzzySystem::empirical, scale, {}, {}, {}, false};
  prof.mu.assign(static_cast<size_t>(m), 0.0);

  const double tail = 1.0 - f.at(scale.lb);
  prof.degenerate = !(tail > 0.0);

  double acc = 0.0;
  for (int r = 1; r <= m; ++r) {
    if (r <= scale.lb) {
      prof.mu[idx(r)] = 0.0;
    } else if (r >= scale.ub) {
      prof.mu[idx(r)] = 1.0;
    } else {
      if (!prof.degenerate) acc += (f.at(r) - f.at(r - 1)) / tail;
      prof.mu[idx(r)] = acc;
    }
  }
  return prof;
}

}  // namespace cubfuzz
