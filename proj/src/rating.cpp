#include "cubfuzz/rating.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cubfuzz {

RatingScale::RatingScale(int m_, int ip_, int lb_, int ub_, Orientation orientation_)
    : m(m_), ip(ip_), lb(lb_), ub(ub_), orientation(orientation_) {
  if (m < 5)
    throw std::invalid_argument("rating scale needs at least 5 categories, got m=" +
                                std::to_string(m));
  if (!(1 <= lb && lb < ip && ip < ub && ub <= m))
    throw std::invalid_argument("rating scale bounds must satisfy 1 <= lb < ip < ub <= m, got lb=" +
                                std::to_string(lb) + " ip=" + std::to_string(ip) +
                                " ub=" + std::to_string(ub) + " m=" + std::to_string(m));
}

RatingScale RatingScale::balanced(int m, Orientation orientation) {
  if (m % 2 == 0)
    throw std::invalid_argument(
        "no default indifference point for an even-length scale; supply ip explicitly");
  return RatingScale(m, (m + 1) / 2, 1, m, orientation);
}

RatingScale reversed(const RatingScale& scale) {
  const int m = scale.m;
  return RatingScale(m, m - scale.ip + 1, m - scale.ub + 1, m - scale.lb + 1,
                     scale.orientation == Orientation::positive ? Orientation::negative
                                                                : Orientation::positive);
}

double Edf::at(int r) const {
  if (r == 0) return 0.0;
  return values.at(static_cast<size_t>(r) - 1);
}

RatingSample build_sample(const std::vector<int>& ratings, const RatingScale& scale) {
  if (ratings.empty()) throw std::invalid_argument("empty sample");
  RatingSample s;
  s.m = scale.m;
  s.ratings = ratings;
  s.freq.assign(static_cast<size_t>(scale.m), 0);
  for (size_t i = 0; i < ratings.size(); ++i) {
    const int r = ratings[i];
    if (r < 1 || r > scale.m)
      throw std::invalid_argument("rating " + std::to_string(r) + " at index " +
                                  std::to_string(i) + " outside 1.." + std::to_string(scale.m));
    ++s.freq[static_cast<size_t>(r) - 1];
  }
  s.n = static_cast<long>(ratings.size());
  return s;
}

RatingSample sample_from_freq(const std::vector<long>& freq, int m) {
  if (static_cast<int>(freq.size()) != m)
    throw std::invalid_argument("frequency table size does not match m");
  RatingSample s;
  s.m = m;
  s.freq = freq;
  s.n = 0;
  for (int r = 1; r <= m; ++r) {
    const long f = freq[static_cast<size_t>(r) - 1];
    if (f < 0) throw std::invalid_argument("negative frequency at category " + std::to_string(r));
    s.n += f;
    s.ratings.insert(s.ratings.end(), static_cast<size_t>(f), r);
  }
  if (s.n == 0) throw std::invalid_argument("empty sample");
  return s;
}

Edf edf(const RatingSample& sample) {
  Edf f;
  f.values.resize(sample.freq.size());
  long cum = 0;
  for (size_t i = 0; i < sample.freq.size(); ++i) {
    cum += sample.freq[i];
    f.values[i] = static_cast<double>(cum) / static_cast<double>(sample.n);
  }
  return f;
}

RatingSample reverse_sample(const RatingSample& sample, const RatingScale& scale) {
  const int m = scale.m;
  if (sample.m != m) throw std::invalid_argument("sample and scale disagree on m");
  RatingSample out;
  out.m = m;
  out.n = sample.n;
  out.ratings.reserve(sample.ratings.size());
  for (int r : sample.ratings) out.ratings.push_back(m - r + 1);
  out.freq.assign(sample.freq.rbegin(), sample.freq.rend());
  return out;
}

}  // namespace cubfuzz
