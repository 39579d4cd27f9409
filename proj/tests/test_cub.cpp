#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cubfuzz/cub.hpp"
#include "cubfuzz/rating.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cubfuzz;

namespace {

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

// brute-force reference: best log-likelihood over a 101x101 (pi, xi) lattice,
// skipping points that put zero mass on an observed category
double grid_max_loglik(const RatingSample& sample) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const CubParams p{i / 100.0, j / 100.0};
      double ll = 0.0;
      bool valid = true;
      for (int r = 1; r <= sample.m && valid; ++r) {
        const long f = sample.freq[static_cast<size_t>(r) - 1];
        if (f == 0) continue;
        const double pr = cub_pmf(p, sample.m, r);
        if (!(pr > 0.0)) valid = false;
        else ll += static_cast<double>(f) * std::log(pr);
      }
      if (valid && ll > best) best = ll;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("shifted binomial boundary conventions and a frozen value") {
  CHECK(shifted_binomial(7, 0.0, 7) == 1.0);
  CHECK(shifted_binomial(7, 1.0, 1) == 1.0);
  CHECK(shifted_binomial(7, 0.0, 3) == 0.0);
  CHECK(std::abs(shifted_binomial(7, 0.3, 5) - 0.324135) < 1e-15);
  CHECK_THROWS_AS(shifted_binomial(7, 0.3, 0), std::out_of_range);
  CHECK_THROWS_AS(shifted_binomial(7, 0.3, 8), std::out_of_range);
  CHECK_THROWS_AS(shifted_binomial(4, 0.3, 1), std::invalid_argument);
  CHECK_THROWS_AS(shifted_binomial(7, -0.1, 1), std::invalid_argument);

  double sum = 0.0;
  for (int r = 1; r <= 7; ++r) sum += shifted_binomial(7, 0.41, r);
  CHECK(std::abs(sum - 1.0) < 1e-14);
}

TEST_CASE("cub pmf values") {
  for (int r = 1; r <= 7; ++r) CHECK(cub_pmf(CubParams{0.0, 0.5}, 7, r) == 1.0 / 7);
  CHECK(cub_pmf(CubParams{1.0, 0.0}, 7, 7) == 1.0);
  CHECK(std::abs(cub_pmf(CubParams{0.7, 0.3}, 7, 5) - 0.2697516428571429) < 1e-15);
}

TEST_CASE("shelter pmf and the equivalent parameterization") {
  const CubShelterParams zero{0.8, 0.2, 0.0, 7};
  for (int r = 1; r <= 7; ++r)
    CHECK(cub_shelter_pmf(zero, 7, r) == cub_pmf(CubParams{0.8, 0.2}, 7, r));

  CHECK(cub_shelter_pmf(CubShelterParams{0.8, 0.2, 1.0, 4}, 7, 4) == 1.0);

  const CubShelterParams p{0.8, 0.2, 0.15, 7};
  for (int r = 1; r <= 7; ++r) {
    const double direct = cub_shelter_pmf(p, 7, r);
    const double alt = p.pi1() * shifted_binomial(7, p.xi, r) + p.pi2() / 7 +
                       (1.0 - p.pi1() - p.pi2()) * (r == p.c ? 1.0 : 0.0);
    CHECK(std::abs(direct - alt) < 1e-12);
  }

  testutil::Rng rng(17);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 5 + 2 * rng.integer(0, 2);
    const CubShelterParams q{rng.real(0.01, 0.99), rng.real(), rng.real(0.0, 0.95),
                             rng.integer(1, m)};
    for (int r = 1; r <= m; ++r) {
      const double direct = cub_shelter_pmf(q, m, r);
      const double alt = q.pi1() * shifted_binomial(m, q.xi, r) + q.pi2() / m +
                         (1.0 - q.pi1() - q.pi2()) * (r == q.c ? 1.0 : 0.0);
      CHECK(std::abs(direct - alt) < 1e-12);
    }
  }
}

TEST_CASE("pmf tables are normalized") {
  for (int m : {5, 7, 9, 10}) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const std::vector<double> t = cub_pmf_table(CubParams{i / 20.0, j / 20.0}, m);
        double sum = 0.0;
        for (double p : t) sum += p;
        CHECK(std::abs(sum - 1.0) < 1e-12);
      }
    }
  }
  testutil::Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 5 + rng.integer(0, 5);
    const std::vector<double> t = cub_shelter_pmf_table(
        CubShelterParams{rng.real(), rng.real(), rng.real(0.0, 0.99), rng.integer(1, m)}, m);
    double sum = 0.0;
    for (double p : t) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("reversibility of the pmf") {
  testutil::Rng rng(29);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 5 + rng.integer(0, 5);
    const double pi = rng.real();
    const double xi = rng.real();
    for (int r = 1; r <= m; ++r)
      CHECK(std::abs(cub_pmf(CubParams{pi, xi}, m, r) -
                     cub_pmf(CubParams{pi, 1.0 - xi}, m, m - r + 1)) < 1e-14);
    const double delta = rng.real(0.0, 0.9);
    const int c = rng.integer(1, m);
    for (int r = 1; r <= m; ++r)
      CHECK(std::abs(cub_shelter_pmf(CubShelterParams{pi, xi, delta, c}, m, r) -
                     cub_shelter_pmf(CubShelterParams{pi, 1.0 - xi, delta, m - c + 1}, m,
                                     m - r + 1)) < 1e-14);
  }
  // dyadic feeling values reflect without rounding at all
  for (int k = 0; k <= 16; ++k) {
    const double xi = k / 16.0;
    for (int r = 1; r <= 7; ++r)
      CHECK(cub_pmf(CubParams{0.625, xi}, 7, r) ==
            cub_pmf(CubParams{0.625, 1.0 - xi}, 7, 7 - r + 1));
  }
}

TEST_CASE("loglik sums frequency-weighted log pmf") {
  const RatingSample one = sample_from_freq({0, 0, 0, 0, 1, 0, 0}, 7);
  const CubParams p{0.7, 0.3};
  CHECK(std::abs(loglik(one, p) - std::log(cub_pmf(p, 7, 5))) < 1e-15);

  const RatingSample ten = sample_from_freq({0, 0, 0, 0, 10, 0, 0}, 7);
  CHECK(std::abs(loglik(ten, p) - 10.0 * std::log(cub_pmf(p, 7, 5))) < 1e-12);

  const RatingSample worked = sample_from_freq({1, 1, 2, 2, 6, 4, 4}, 7);
  CHECK(std::abs(loglik(worked, p) - (-36.23397273401439)) < 1e-10);

  try {
    loglik(worked, CubParams{1.0, 0.0});  // all mass at category 7
    FAIL("expected a throw");
  } catch (const std::domain_error& e) {
    CHECK(message_contains(e, "category 1"));
  }
}

TEST_CASE("EM recovers simulated parameters") {
  const RatingSample s = simulate(CubParams{0.8, 0.2}, 7, 5000, 4242);
  const CubFit fit = fit_cub(s);
  CHECK(fit.converged);
  CHECK_FALSE(fit.boundary);
  CHECK(std::abs(fit.base().pi - 0.8) <= 0.05);
  CHECK(std::abs(fit.base().xi - 0.2) <= 0.02);
  CHECK(fit.std_errors.size() == 2);
  CHECK(std::abs(fit.bic - (-2.0 * fit.loglik + 2.0 * std::log(5000.0))) < 1e-9);

  // identical inputs give the identical fit
  const CubFit again = fit_cub(simulate(CubParams{0.8, 0.2}, 7, 5000, 4242));
  CHECK(again.base().pi == fit.base().pi);
  CHECK(again.base().xi == fit.base().xi);
}

TEST_CASE("EM beats the lattice oracle and is monotone") {
  testutil::Rng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    const RatingSample s =
        simulate(CubParams{rng.real(0.15, 0.9), rng.real(0.1, 0.9)}, 7, 500, 100 + rng.integer(0, 1 << 20));
    const CubFit fit = fit_cub(s);
    CHECK(fit.loglik >= grid_max_loglik(s) - 1e-6);
    for (size_t i = 1; i < fit.loglik_trace.size(); ++i)
      CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-10);
  }
}

TEST_CASE("uniform data drive pi to the lower clamp") {
  const RatingSample s = sample_from_freq({10, 10, 10, 10, 10, 10, 10}, 7);
  const CubFit fit = fit_cub(s);
  CHECK(fit.base().pi == 1e-6);
  CHECK(fit.boundary);
  CHECK(fit.std_errors.empty());
  CHECK(fit.loglik >= grid_max_loglik(s) - 1e-6);
}

TEST_CASE("degenerate samples are rejected unless boundary fits are allowed") {
  const RatingSample s = sample_from_freq({0, 0, 0, 0, 40, 0, 0}, 7);
  CHECK_THROWS_AS(fit_cub(s), std::invalid_argument);
  FitOptions opts;
  opts.allow_boundary = true;
  const CubFit shelter = fit_cub_shelter(s, 5, opts);
  CHECK(shelter.shelter().delta >= 1.0 - 1e-4);
  CHECK(shelter.boundary);
}

TEST_CASE("shelter EM recovers delta and the auto rule finds c") {
  const RatingSample s = simulate(CubShelterParams{0.8, 0.2, 0.2, 7}, 7, 5000, 777);
  const CubFit fit = fit_cub_shelter_auto(s);
  CHECK(fit.shelter().c == 7);
  CHECK(std::abs(fit.shelter().delta - 0.2) <= 0.05);
  CHECK(fit.converged);
  CHECK(fit.std_errors.size() == 3);
  CHECK(std::abs(fit.bic - (-2.0 * fit.loglik + 3.0 * std::log(5000.0))) < 1e-9);
}

TEST_CASE("shelter fit on shelter-free data stays near the baseline") {
  const RatingSample s = simulate(CubParams{0.8, 0.2}, 7, 5000, 555);
  const CubFit base = fit_cub(s);
  const CubFit shelter = fit_cub_shelter(s, 7, FitOptions{});
  CHECK(shelter.shelter().delta <= 0.03);
  CHECK(std::abs(shelter.shelter().pi_star - base.base().pi) <= 0.03);
  CHECK(std::abs(shelter.shelter().xi - base.base().xi) <= 0.03);
  const LrTest t = lr_test(base, shelter, s.n);
  CHECK(t.statistic >= 0.0);
}

TEST_CASE("likelihood ratio test values") {
  CubFit base;
  base.params = CubParams{0.5, 0.5};
  base.loglik = -100.0;
  base.n = 50;
  CubFit shelter;
  shelter.params = CubShelterParams{0.5, 0.5, 0.1, 7};
  shelter.loglik = -100.0;
  shelter.n = 50;

  const LrTest same = lr_test(base, shelter, 50);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  CHECK(std::abs(chi2_sf_1df(3.841) - 0.0500136837639567) < 1e-12);
  shelter.loglik = -90.0;
  const LrTest strong = lr_test(base, shelter, 50);
  CHECK(strong.statistic == 20.0);
  CHECK(std::abs(strong.p_value - 7.74421643104408e-6) < 1e-18);
  CHECK(strong.p_value < 1e-4);

  shelter.loglik = -100.1;
  CHECK_THROWS_AS(lr_test(base, shelter, 50), std::runtime_error);
  shelter.loglik = -100.0 - 1e-9;  // within the numeric guard
  CHECK(lr_test(base, shelter, 50).statistic == 0.0);
  CHECK_THROWS_AS(lr_test(shelter, base, 50), std::invalid_argument);
  CHECK_THROWS_AS(lr_test(base, shelter, 51), std::invalid_argument);
}

TEST_CASE("standard errors scale like one over root n") {
  const std::vector<long> freq{5, 8, 12, 20, 35, 60, 40};
  const RatingSample s1 = sample_from_freq(freq, 7);
  std::vector<long> freq4 = freq;
  for (long& f : freq4) f *= 4;
  const RatingSample s4 = sample_from_freq(freq4, 7);

  const CubFit f1 = fit_cub(s1);
  const CubFit f4 = fit_cub(s4);
  REQUIRE(f1.std_errors.size() == 2);
  REQUIRE(f4.std_errors.size() == 2);
  for (int i = 0; i < 2; ++i) {
    const double ratio = f1.std_errors[static_cast<size_t>(i)] /
                         f4.std_errors[static_cast<size_t>(i)];
    CHECK(std::abs(ratio - 2.0) <= 0.1);  // halves within 5%
  }
}

TEST_CASE("standard error magnitude at n = 2000") {
  const RatingSample s = simulate(CubParams{0.8, 0.2}, 7, 2000, 909);
  const CubFit fit = fit_cub(s);
  REQUIRE(fit.std_errors.size() == 2);
  CHECK(fit.std_errors[0] >= 0.005);
  CHECK(fit.std_errors[0] <= 0.05);
}

TEST_CASE("boundary fits refuse standard errors") {
  const RatingSample s = sample_from_freq({10, 10, 10, 10, 10, 10, 10}, 7);
  const CubFit fit = fit_cub(s);
  CHECK_THROWS_AS(std_errors(fit, s), std::runtime_error);
}

TEST_CASE("information covariance is symmetric") {
  const RatingSample s = simulate(CubShelterParams{0.8, 0.2, 0.2, 7}, 7, 5000, 321);
  const CubFit fit = fit_cub_shelter(s, 7, FitOptions{});
  const std::vector<double> cov = information_covariance(fit, s);
  REQUIRE(cov.size() == 9);
  CHECK(std::abs(cov[1] - cov[3]) < 1e-9);
  CHECK(std::abs(cov[2] - cov[6]) < 1e-9);
  CHECK(std::abs(cov[5] - cov[7]) < 1e-9);
  const ShelterDerivedSe d = shelter_derived_std_errors(fit, s);
  CHECK(d.pi1 > 0.0);
  CHECK(d.pi2 > 0.0);
  CHECK(d.pi1 < 0.5);
  CHECK(d.pi2 < 0.5);
}

TEST_CASE("fit of the reversed sample mirrors the feeling estimate") {
  const RatingScale scale = RatingScale::balanced(7);
  const RatingSample s = simulate(CubParams{0.7, 0.25}, 7, 3000, 2024);
  const CubFit fit = fit_cub(s);
  const CubFit rfit = fit_cub(reverse_sample(s, scale));
  CHECK(std::abs(rfit.base().xi - (1.0 - fit.base().xi)) <= 1e-6);
  CHECK(std::abs(rfit.base().pi - fit.base().pi) <= 1e-6);
}

TEST_CASE("simulation is deterministic and converges to the pmf") {
  const RatingSample top = simulate(CubParams{1.0, 0.0}, 7, 200, 5);
  CHECK(std::all_of(top.ratings.begin(), top.ratings.end(), [](int r) { return r == 7; }));

  const RatingSample a = simulate(CubParams{0.6, 0.35}, 7, 1000, 99);
  const RatingSample b = simulate(CubParams{0.6, 0.35}, 7, 1000, 99);
  CHECK(a.ratings == b.ratings);
  const RatingSample c = simulate(CubParams{0.6, 0.35}, 7, 1000, 100);
  CHECK(a.ratings != c.ratings);

  const CubParams p{0.55, 0.3};
  const RatingSample big = simulate(p, 7, 100000, 314159);
  for (int r = 1; r <= 7; ++r) {
    const double fhat =
        static_cast<double>(big.freq[static_cast<size_t>(r) - 1]) / static_cast<double>(big.n);
    CHECK(std::abs(fhat - cub_pmf(p, 7, r)) <= 0.02);
  }
}
