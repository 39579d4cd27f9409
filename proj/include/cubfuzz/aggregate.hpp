#pragma once

#include <span>
#include <vector>

#include "cubfuzz/fuzzy.hpp"
#include "cubfuzz/rating.hpp"

namespace cubfuzz {

/// Item weights, non-negative and summing to one.
struct WeightVector {
  std::vector<double> w;

  int size() const { return static_cast<int>(w.size()); }
  double operator[](int k) const { return w.at(static_cast<size_t>(k)); }
};

/// Validates non-negativity and unit sum (tolerance 1e-12).
WeightVector make_weights(std::vector<double> w);

/// Uniform weights 1/K.
WeightVector uniform_weights(int k_items);

/// Fuzzy proportion of membership g = (1/n) sum_j mu(r_j).
double fuzzy_prop_membership(const IfsProfile& profile, const RatingSample& sample);

/// Fuzzy proportion of uncertainty g = (1/n) sum_j u(r_j). Throws
/// std::invalid_argument for a membership-only (empirical) profile;
/// membership-based weights apply there instead.
double fuzzy_prop_uncertainty(const IfsProfile& profile, const RatingSample& sample);

/// w_k = ln(1/g_k) / sum_l ln(1/g_l); smaller g gets larger weight.
/// Values below 1e-9 are floored at 1e-9. Throws std::invalid_argument when
/// every g_k equals 1 (all logarithms vanish; use uniform weights).
WeightVector log_inverse_weights(const std::vector<double>& g);

/// Per-respondent intuitionistic weighted aggregator mean.
struct RespondentAggregate {
  double mu;
  double nu;
};

/// IWAM pair (sum_k w_k mu_k(r_k), sum_k w_k nu_k(r_k)) for one complete
/// row of ratings. All profiles must carry nu (no empirical system here).
RespondentAggregate iwam(std::span<const int> ratings_row,
                         const std::vector<IfsProfile>& profiles,
                         const WeightVector& w);

/// Composite indicators aggregated uniformly over respondents.
struct CompositeResult {
  double mu_bar;
  double nu_bar;
  double u_bar;  ///< 1 - mu_bar - nu_bar
  double s_bar;  ///< mu_bar - nu_bar
  double a_bar;  ///< mu_bar + nu_bar
  WeightVector weights;
  std::vector<RespondentAggregate> per_respondent;
};

CompositeResult composite(const std::vector<std::vector<int>>& rows,
                          const std::vector<IfsProfile>& profiles,
                          const WeightVector& w);

/// Weighted membership per category, mu~(r) = sum_k w_k mu_k(r). Accepts
/// membership-only profiles.
std::vector<double> category_weighted_membership(const std::vector<IfsProfile>& profiles,
                                                 const WeightVector& w);

/// Normalized Hamming distance between two sequences of IFS triples,
/// d = (1/2n) sum_i (|dmu| + |dnu| + |du|), in [0,1].
double hamming_distance(std::span<const IfsTriple> b, std::span<const IfsTriple> c);

}  // namespace cubfuzz
