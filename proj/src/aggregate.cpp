#include "cubfuzz/aggregate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cubfuzz {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kProportionFloor = 1e-9;

void check_profile_sample(const IfsProfile& profile, const RatingSample& sample) {
  if (profile.scale.m != sample.m)
    throw std::invalid_argument("profile is on an m=" + std::to_string(profile.scale.m) +
                                " scale but the sample has m=" + std::to_string(sample.m));
  if (sample.n < 1) throw std::invalid_argument("empty sample");
}

double freq_mean(const RatingSample& sample, const std::vector<double>& values) {
  double s = 0.0;
  for (int r = 1; r <= sample.m; ++r)
    s += static_cast<double>(sample.freq[static_cast<size_t>(r) - 1]) *
         values[static_cast<size_t>(r) - 1];
  return s / static_cast<double>(sample.n);
}

}  // namespace

WeightVector make_weights(std::vector<double> w) {
  if (w.empty()) throw std::invalid_argument("empty weight vector");
  double sum = 0.0;
  for (size_t k = 0; k < w.size(); ++k) {
    if (!(w[k] >= 0.0))
      throw std::invalid_argument("weight " + std::to_string(k + 1) + " is negative");
    sum += w[k];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("weights sum to " + std::to_string(sum) + ", expected 1");
  return WeightVector{std::move(w)};
}

WeightVector uniform_weights(int k_items) {
  if (k_items < 1) throw std::invalid_argument("need at least one item");
  return WeightVector{std::vector<double>(static_cast<size_t>(k_items), 1.0 / k_items)};
}

double fuzzy_prop_membership(const IfsProfile& profile, const RatingSample& sample) {
  check_profile_sample(profile, sample);
  return freq_mean(sample, profile.mu);
}

double fuzzy_prop_uncertainty(const IfsProfile& profile, const RatingSample& sample) {
  check_profile_sample(profile, sample);
  if (!profile.has_ifs())
    throw std::invalid_argument(
        "empirical profiles have no uncertainty component; use membership-based weights");
  return freq_mean(sample, profile.u);
}

WeightVector log_inverse_weights(const std::vector<double>& g) {
  if (g.empty()) throw std::invalid_argument("empty proportion vector");
  std::vector<double> w(g.size());
  double total = 0.0;
  for (size_t k = 0; k < g.size(); ++k) {
    if (!(g[k] >= 0.0 && g[k] <= 1.0))
      throw std::invalid_argument("proportion " + std::to_string(k + 1) + " outside [0,1]");
    w[k] = std::log(1.0 / std::max(g[k], kProportionFloor));
    total += w[k];
  }
  if (!(total > 0.0))
    throw std::invalid_argument(
        "every proportion equals 1; log-inverse weights are undefined (use uniform weights)");
  for (double& wk : w) wk /= total;
  return WeightVector{std::move(w)};
}

RespondentAggregate iwam(std::span<const int> ratings_row,
                         const std::vector<IfsProfile>& profiles,
                         const WeightVector& w) {
  const size_t k_items = profiles.size();
  if (ratings_row.size() != k_items || static_cast<size_t>(w.size()) != k_items)
    throw std::invalid_argument("row, profile and weight counts differ");
  if (k_items == 0) throw std::invalid_argument("no items");
  RespondentAggregate agg{0.0, 0.0};
  for (size_t k = 0; k < k_items; ++k) {
    const IfsTriple t = profiles[k].triple(ratings_row[k]);
    const double wk = w[static_cast<int>(k)];
    agg.mu += wk * t.mu;
    agg.nu += wk * t.nu;
  }
  return agg;
}

CompositeResult composite(const std::vector<std::vector<int>>& rows,
                          const std::vector<IfsProfile>& profiles,
                          const WeightVector& w) {
  if (rows.empty()) throw std::invalid_argument("no complete respondent rows");
  CompositeResult res;
  res.weights = w;
  res.per_respondent.reserve(rows.size());
  double mu_sum = 0.0, nu_sum = 0.0;
  for (const std::vector<int>& row : rows) {
    const RespondentAggregate agg = iwam(std::span<const int>(row.data(), row.size()),
                                         profiles, w);
    mu_sum += agg.mu;
    nu_sum += agg.nu;
    res.per_respondent.push_back(agg);
  }
  const double n = static_cast<double>(rows.size());
  res.mu_bar = mu_sum / n;
  res.nu_bar = nu_sum / n;
  res.u_bar = 1.0 - res.mu_bar - res.nu_bar;
  res.s_bar = res.mu_bar - res.nu_bar;
  res.a_bar = res.mu_bar + res.nu_bar;
  return res;
}

std::vector<double> category_weighted_membership(const std::vector<IfsProfile>& profiles,
                                                 const WeightVector& w) {
  if (profiles.empty()) throw std::invalid_argument("no items");
  if (static_cast<size_t>(w.size()) != profiles.size())
    throw std::invalid_argument("profile and weight counts differ");
  const int m = profiles.front().scale.m;
  for (const IfsProfile& p : profiles)
    if (p.scale.m != m) throw std::invalid_argument("profiles are on different scales");
  std::vector<double> out(static_cast<size_t>(m), 0.0);
  for (size_t k = 0; k < profiles.size(); ++k)
    for (int r = 1; r <= m; ++r)
      out[static_cast<size_t>(r) - 1] +=
          w[static_cast<int>(k)] * profiles[k].mu[static_cast<size_t>(r) - 1];
  return out;
}

double hamming_distance(std::span<const IfsTriple> b, std::span<const IfsTriple> c) {
  if (b.size() != c.size()) throw std::invalid_argument("sequences differ in length");
  if (b.empty()) throw std::invalid_argument("empty sequences");
  double total = 0.0;
  for (size_t i = 0; i < b.size(); ++i)
    total += std::abs(b[i].mu - c[i].mu) + std::abs(b[i].nu - c[i].nu) +
             std::abs(b[i].u - c[i].u);
  return total / (2.0 * static_cast<double>(b.size()));
}

}  // namespace cubfuzz
