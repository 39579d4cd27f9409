#pragma once

#include <vector>

#include "cubfuzz/rating.hpp"

namespace cubfuzz {

/// Intuitionistic membership / non-membership / hesitancy triple with
/// mu + nu + u = 1 and 0 <= mu + nu <= 1.
struct IfsTriple {
  double mu;
  double nu;
  double u;
};

/// Fuzzy score s = mu - nu in [-1, 1].
double fuzzy_score(const IfsTriple& t);

/// Fuzzy accuracy a = mu + nu = 1 - u in [0, 1].
double fuzzy_accuracy(const IfsTriple& t);

enum class FuzzySystem { cub_fuzzy, spline, empirical };

/// Spline system parameters; a = 0 or b = 0 mean "use the defaults a = 1,
/// b = m - 1" resolved against the scale.
struct SplineConfig {
  double epsilon = 1.0;  ///< spline exponent, > 0
  double theta = 1.0;    ///< hesitancy exponent on mu, >= 1
  double eta = 1.0;      ///< hesitancy exponent on 1 - mu, >= 1
  int a = 0;             ///< lower spline knot, 1 <= a < ip
  int b = 0;             ///< upper spline knot, ip < b <= m
};

/// Per-category fuzzy profile of one item. The empirical system is a
/// classical fuzzy set: only mu is populated and has_ifs() is false.
struct IfsProfile {
  FuzzySystem system;
  RatingScale scale;
  std::vector<double> mu;  ///< size m
  std::vector<double> nu;  ///< size m, empty for the empirical system
  std::vector<double> u;   ///< size m, empty for the empirical system
  bool degenerate = false; ///< empirical system with no mass above lb

  bool has_ifs() const { return !nu.empty(); }
  double mu_at(int r) const { return mu.at(static_cast<size_t>(r) - 1); }
  double nu_at(int r) const { return nu.at(static_cast<size_t>(r) - 1); }
  double u_at(int r) const { return u.at(static_cast<size_t>(r) - 1); }
  IfsTriple triple(int r) const;  ///< throws for the empirical system
};

/// Membership piecewise-linear in the empirical distribution function,
/// scaled by the estimated weight pi1_hat of the deliberate component;
/// hesitancy constant at 1 - pi1_hat between the crisp bounds; crisp values
/// outside. Requires a positive-orientation scale (reverse the sample
/// first otherwise). A flat branch (no respondents on one non-crisp side)
/// keeps mu at pi1_hat / 2 there.
IfsProfile cub_fuzzy_profile(const Edf& f, double pi1_hat, const RatingScale& scale);

/// Spline membership on the categories themselves, clamped into [0,1];
/// u = mu^theta (1-mu)^eta and nu = 1 - mu - u. Identical for every item
/// sharing the scale and config.
IfsProfile spline_profile(const RatingScale& scale, const SplineConfig& cfg = {});

/// Classical fuzzy-set membership mu(r) accumulated from the normalized
/// empirical distribution increments; membership-only profile.
IfsProfile empirical_profile(const Edf& f, const RatingScale& scale);

}  // namespace cubfuzz
