#include <cmath>
#include <vector>

#include "doctest.h"
#include "gridtraffic/engine.hpp"
#include "gridtraffic/estimation.hpp"

using namespace gridtraffic;

namespace {

ObservationBatch batch(std::int64_t n, std::int64_t sigma) { return {n, sigma}; }

double binomial_pmf(int m, int k, double p) {
  return std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0)) *
         std::pow(p, k) * std::pow(1.0 - p, m - k);
}

}  // namespace

TEST_CASE("observation xi is the number of CO participants") {
  CHECK(MeetingObservation{1, 1}.xi() == 2);
  CHECK(MeetingObservation{0, 1}.xi() == 1);
  ObservationBatch b;
  b.add({1, 0});
  b.add({1, 1});
  CHECK(b.n == 2);
  CHECK(b.sigma_xi == 3);
}

TEST_CASE("minimax estimate") {
  CHECK(minimax_estimate(batch(2, 0)) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (std::int64_t n : {1, 2, 7, 50, 1000}) CHECK(minimax_estimate(batch(n, n)) == 0.5);
  for (std::int64_t n : {1, 3, 40}) {
    double last = 0.0;
    for (std::int64_t s = 0; s <= 2 * n; ++s) {
      const double e = minimax_estimate(batch(n, s));
      CHECK(e > last);
      CHECK(e < 1.0);
      last = e;
    }
  }
  CHECK(minimax_estimate(batch(2, 0), MinimaxConstants{0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(minimax_estimate(batch(0, 0)), NoDataError);
}

TEST_CASE("minimax risk is flat in p (exact binomial sum)") {
  const int n = 8, m = 2 * n;
  const double flat = m / (4.0 * std::pow(m + std::sqrt(m), 2));
  for (int i = 0; i <= 10; ++i) {
    const double p = i / 10.0;
    double risk = 0.0;
    for (int k = 0; k <= m; ++k) {
      const double e = minimax_estimate(batch(n, k));
      risk += binomial_pmf(m, k, p) * (e - p) * (e - p);
    }
    CHECK(risk == doctest::Approx(flat).epsilon(1e-10));
  }
}

TEST_CASE("minimax risk is flat in p (Monte Carlo, m = 16)") {
  const int n = 8, m = 2 * n, trials = 100000;
  const double flat = m / (4.0 * std::pow(m + std::sqrt(m), 2));
  Rng rng(2024);
  for (int i = 0; i <= 10; ++i) {
    const double p = i / 10.0;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
      int k = 0;
      for (int j = 0; j < m; ++j) k += rng.bernoulli(p) ? 1 : 0;
      const double e = minimax_estimate(batch(n, k));
      const double loss = (e - p) * (e - p);
      sum += loss;
      sum_sq += loss * loss;
    }
    const double mean = sum / trials;
    const double se = std::sqrt(std::max(sum_sq / trials - mean * mean, 0.0) / trials);
    CHECK(std::abs(mean - flat) <= std::max(3.0 * se, 1e-12));
  }
}

TEST_CASE("Bayes posterior mean") {
  CHECK(bayes_estimate(batch(0, 0)) == 0.5);
  CHECK(bayes_estimate(batch(1, 2)) == 0.75);
  CHECK(bayes_estimate(batch(0, 0), 2.0, 6.0) == 0.25);
  CHECK(std::abs(bayes_estimate(batch(100000, 140000), 3.0, 1.0) - 0.7) < 1e-3);
  for (std::int64_t s = 0; s <= 10; ++s) {
    const double e = bayes_estimate(batch(5, s), 0.5, 0.5);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
  }
  CHECK_THROWS_AS(bayes_estimate(batch(1, 1), 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(bayes_estimate(batch(1, 1), 1.0, -2.0), ConfigError);
}

TEST_CASE("harvest: an all-CO run gives sigma_xi = 2n") {
  SimConfig cfg;
  cfg.behavior = FixedRatio{1.0};
  cfg.log_meetings = true;
  Simulation sim(cfg);
  sim.run(1000);
  const ObservationBatch from_log = harvest_observations(sim.state().meeting_log);
  CHECK(from_log.n > 0);
  CHECK(from_log.sigma_xi == 2 * from_log.n);
  const ObservationBatch from_run = harvest_observations(sim.summary());
  CHECK(from_run.sigma_xi == 2 * from_run.n);
}

TEST_CASE("harvest: no meetings is an error") {
  CHECK_THROWS_AS(harvest_observations(RunSummary{}), NoDataError);
  CHECK_THROWS_AS(harvest_observations(std::vector<MeetingRecord>{}), NoDataError);
}

TEST_CASE("harvest and estimate recover the CO share of a fixed-ratio run") {
  SimConfig cfg;
  cfg.behavior = FixedRatio{0.75};
  cfg.p_new = 0.3;
  cfg.seed = 8;
  const RunSummary r = run_replicate(cfg, 20000);
  const ObservationBatch b = harvest_observations(r);
  REQUIRE(b.n >= 10000);
  CHECK(std::abs(minimax_estimate(b) - 0.75) < 0.02);
  CHECK(std::abs(bayes_estimate(b) - 0.75) < 0.02);
}
