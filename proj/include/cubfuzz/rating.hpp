#pragma once

#include <cstdint>
#include <vector>

namespace cubfuzz {

/// Direction of the scale: positive means "the greater the score, the
/// higher the feeling".
enum class Orientation { positive, negative };

/// An ordinal rating scale with m integer categories 1..m, an indifference
/// point and crisp bounds delimiting the categories that receive
/// deterministic (non-)membership.
struct RatingScale {
  int m;           ///< number of categories, >= 5
  int ip;          ///< indifference point, lb < ip < ub
  int lb;          ///< lower crisp bound (categories <= lb are crisp negative)
  int ub;          ///< upper crisp bound (categories >= ub are crisp positive)
  Orientation orientation = Orientation::positive;

  RatingScale(int m, int ip, int lb, int ub,
              Orientation orientation = Orientation::positive);

  /// Scale with the default midpoint ip = (m+1)/2 and crisp bounds lb = 1,
  /// ub = m. Only defined for odd m; even-length scales need an explicit ip.
  static RatingScale balanced(int m, Orientation orientation = Orientation::positive);
};

/// Mirror image of a scale under the category reflection r -> m - r + 1.
RatingScale reversed(const RatingScale& scale);

/// A sample of integer ratings for one item, with its frequency table.
struct RatingSample {
  int m = 0;                   ///< category count of the underlying scale
  std::vector<int> ratings;    ///< raw ratings, each in 1..m
  std::vector<long> freq;      ///< freq[r-1] = count of category r, size m
  long n = 0;                  ///< total count, == ratings.size()
};

/// Empirical distribution function F(1)..F(m) of a sample.
struct Edf {
  std::vector<double> values;  ///< F(r) at values[r-1]; F(m) == 1

  int m() const { return static_cast<int>(values.size()); }
  /// F(r) with the convention F(0) = 0.
  double at(int r) const;
};

/// Builds a validated sample. Throws std::invalid_argument on an empty
/// sequence or on a rating outside 1..m (the message names the offending
/// index).
RatingSample build_sample(const std::vector<int>& ratings, const RatingScale& scale);

/// Builds a sample directly from a frequency table (ratings are
/// materialized in ascending category order).
RatingSample sample_from_freq(const std::vector<long>& freq, int m);

/// Empirical distribution function F(r) = #(ratings <= r) / n.
Edf edf(const RatingSample& sample);

/// Reflects every rating r -> m - r + 1; the frequency table is mirrored
/// and n is unchanged.
RatingSample reverse_sample(const RatingSample& sample, const RatingScale& scale);

}  // namespace cubfuzz
