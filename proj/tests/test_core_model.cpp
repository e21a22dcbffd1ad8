#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "shrinkem/core_model.hpp"
#include "test_util.hpp"

using namespace shrinkem;

TEST_SUITE("core_model") {

TEST_CASE("truncated poisson matches closed forms") {
  // No stock forces zero sales with probability 1.
  CHECK(trunc_poisson_logpmf(0, 0, 5.0) == 0.0);

  // Interior point: plain Poisson log-pmf.
  const double pmf2 = -5.0 + 2.0 * std::log(5.0) - std::log(2.0);
  CHECK(trunc_poisson_logpmf(2, 10, 5.0) == doctest::Approx(pmf2).epsilon(1e-14));

  // Censored point: upper tail, summed independently here.
  double cdf = 0.0;
  double term = std::exp(-5.0);
  for (int k = 0; k < 3; ++k) {
    cdf += term;
    term *= 5.0 / (k + 1);
  }
  CHECK(trunc_poisson_logpmf(3, 3, 5.0) ==
        doctest::Approx(std::log1p(-cdf)).epsilon(1e-13));
  CHECK(std::log1p(-cdf) == doctest::Approx(-0.13314).epsilon(1e-4));

  CHECK(trunc_poisson_logpmf(4, 3, 5.0) == kLogZero);
  CHECK_THROWS_AS(trunc_poisson_logpmf(1, 2, 0.0), std::domain_error);
  CHECK_THROWS_AS(trunc_poisson_logpmf(1, 2, -1.0), std::domain_error);
}

TEST_CASE("truncated poisson is stable at large counts") {
  const Units big = 1000000;
  const double uncensored = trunc_poisson_logpmf(big, big + 1, 5.0);
  CHECK(std::isfinite(uncensored));
  const double direct =
      -5.0 + static_cast<double>(big) * std::log(5.0) -
      std::lgamma(static_cast<double>(big) + 1.0);
  CHECK(uncensored == doctest::Approx(direct).epsilon(1e-12));
  // Far-above-the-rate tail: both routes must stay finite, and the tail
  // strictly contains the pmf at its leading term.
  const double tail = trunc_poisson_logpmf(big, big, 5.0);
  CHECK(std::isfinite(tail));
  CHECK(tail > uncensored);
}

TEST_CASE("truncated poisson normalizes") {
  for (const double sigma : {0.5, 5.0, 20.0}) {
    for (Units i_prev = 0; i_prev <= 40; ++i_prev) {
      double total = 0.0;
      for (Units s = 0; s <= i_prev; ++s) {
        total += std::exp(trunc_poisson_logpmf(s, i_prev, sigma));
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("censored tail grows with the rate") {
  for (const Units i : {Units{1}, Units{3}, Units{10}}) {
    double prev = -1e300;
    for (double sigma = 0.1; sigma <= 20.0; sigma += 0.1) {
      const double tail = trunc_poisson_logpmf(i, i, sigma);
      CHECK(tail >= prev);
      prev = tail;
    }
  }
}

TEST_CASE("truncated bernoulli") {
  CHECK(trunc_bernoulli_logpmf(0, 0, 0.9) == 0.0);
  CHECK(trunc_bernoulli_logpmf(1, 0, 0.9) == kLogZero);
  CHECK(trunc_bernoulli_logpmf(1, 3, 0.25) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-15));
  CHECK(trunc_bernoulli_logpmf(0, 3, 0.25) ==
        doctest::Approx(std::log(0.75)).epsilon(1e-15));
  // Boundary parameters are legal and yield -infinity, not errors.
  CHECK(trunc_bernoulli_logpmf(1, 3, 0.0) == kLogZero);
  CHECK(trunc_bernoulli_logpmf(0, 3, 1.0) == kLogZero);
  CHECK(trunc_bernoulli_logpmf(1, 3, 1.0) == 0.0);
  CHECK_THROWS_AS(trunc_bernoulli_logpmf(2, 3, 0.5), std::domain_error);
  CHECK_THROWS_AS(trunc_bernoulli_logpmf(0, 3, 1.5), std::domain_error);
}

TEST_CASE("feasible range") {
  CHECK(feasible_range(10, 4, 0).lo == 5);
  CHECK(feasible_range(10, 4, 0).hi == 6);
  CHECK(feasible_range(10, 10, 20).lo == 20);
  CHECK(feasible_range(10, 10, 20).hi == 20);
  CHECK(feasible_range(0, 0, 7).lo == 7);
  CHECK(feasible_range(0, 0, 7).hi == 7);
  CHECK_THROWS_AS(feasible_range(3, 4, 0), InfeasibleError);

  for (Units i_prev = 0; i_prev <= 15; ++i_prev) {
    for (Units s = 0; s <= i_prev; ++s) {
      for (const Units r : {Units{0}, Units{1}, Units{7}}) {
        const LevelRange range = feasible_range(i_prev, s, r);
        CHECK(range.lo <= range.hi);
        CHECK(range.hi - range.lo <= 1);
        CHECK(range.lo >= r);
      }
    }
  }
}

TEST_CASE("transition kernel") {
  CHECK(transition_logprob(10, 4, 0, 6, 0.25) ==
        doctest::Approx(std::log(0.75)).epsilon(1e-15));
  CHECK(transition_logprob(10, 4, 0, 5, 0.25) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-15));
  CHECK(transition_logprob(10, 10, 20, 20, 0.25) == 0.0);
  CHECK(transition_logprob(10, 4, 0, 7, 0.25) == kLogZero);
  CHECK(transition_logprob(10, 4, 0, 4, 0.25) == kLogZero);  // loss of 2
  CHECK_THROWS_AS(transition_logprob(3, 4, 0, 0, 0.25), InfeasibleError);
}

TEST_CASE("transition kernel normalizes over the feasible range") {
  for (const double lambda : {0.0, 0.25, 1.0}) {
    for (Units i_prev = 0; i_prev <= 12; ++i_prev) {
      for (Units s = 0; s <= i_prev; ++s) {
        for (const Units r : {Units{0}, Units{3}, Units{20}}) {
          const LevelRange range = feasible_range(i_prev, s, r);
          double total = 0.0;
          for (Units nxt = range.lo; nxt <= range.hi; ++nxt) {
            total += std::exp(transition_logprob(i_prev, s, r, nxt, lambda));
          }
          CHECK(std::abs(total - 1.0) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("step score") {
  const ObservedTrace trace{10, {4}, {0}};
  const Params params{5.0, 0.25};
  const double expected =
      (-5.0 + 4.0 * std::log(5.0) - std::log(24.0)) + std::log(0.75);
  CHECK(step_score(10, 6, 1, trace, params) ==
        doctest::Approx(expected).epsilon(1e-14));

  const ObservedTrace forced{0, {0}, {5}};
  CHECK(step_score(0, 5, 1, forced, params) == 0.0);

  CHECK(step_score(10, 8, 1, trace, params) == kLogZero);
  CHECK(step_score(2, 0, 1, trace, params) == kLogZero);  // sales above stock
  CHECK_THROWS_AS(step_score(10, 6, 0, trace, params), std::out_of_range);
  CHECK_THROWS_AS(step_score(10, 6, 2, trace, params), std::out_of_range);
}

TEST_CASE("trajectory log-likelihood") {
  const ObservedTrace single{10, {4}, {0}};
  const Params params{5.0, 0.25};
  CHECK(trajectory_loglik({6}, single, params) ==
        step_score(10, 6, 1, single, params));

  const ObservedTrace toy{3, {1, 1}, {0, 0}};
  const Params toy_params{1.0, 0.25};
  const double expected = 2.0 * (-1.0 + std::log(0.75));
  CHECK(trajectory_loglik({2, 1}, toy, toy_params) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(trajectory_loglik({2, 2}, toy, toy_params) == kLogZero);
  CHECK_THROWS_AS(trajectory_loglik({2}, toy, toy_params),
                  std::invalid_argument);
}

TEST_CASE("finite score iff every step feasible, by exhaustion") {
  std::mt19937_64 rng(20260810);
  const Params params{1.0, 0.25};
  int checked = 0;
  int mismatches = 0;
  for (int rep = 0; rep < 60 && checked < 25; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 4, 6);
    const std::size_t T = trace.horizon();
    std::vector<Units> bounds(T + 1, trace.initial_inventory);
    double sequences = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
      bounds[t] = bounds[t - 1] - trace.sales[t - 1] + trace.replenishments[t - 1];
      sequences *= static_cast<double>(bounds[t] + 1);
    }
    if (sequences > 20000.0) continue;
    ++checked;
    // Odometer over every level sequence within the running bounds.
    Trajectory levels(T, 0);
    while (true) {
      bool feasible = true;
      Units prev = trace.initial_inventory;
      for (std::size_t t = 0; t < T && feasible; ++t) {
        if (trace.sales[t] > prev) {
          feasible = false;
          break;
        }
        const LevelRange range =
            feasible_range(prev, trace.sales[t], trace.replenishments[t]);
        feasible = levels[t] >= range.lo && levels[t] <= range.hi;
        prev = levels[t];
      }
      const LogLik score = trajectory_loglik(levels, trace, params);
      if ((score > kLogZero) != feasible) ++mismatches;
      // advance odometer
      std::size_t pos = 0;
      while (pos < T && ++levels[pos] > bounds[pos + 1]) {
        levels[pos] = 0;
        ++pos;
      }
      if (pos == T) break;
    }
  }
  CHECK(checked >= 10);
  CHECK(mismatches == 0);
}

TEST_CASE("trace validation") {
  CHECK_NOTHROW(validate_trace({15, {5, 3}, {0, 20}}));
  CHECK_NOTHROW(validate_trace({0, {0, 0}, {4, 0}}));
  CHECK_THROWS_WITH_AS(validate_trace({2, {5}, {0}}),
                       doctest::Contains("period 1"), InfeasibleError);
  CHECK_THROWS_WITH_AS(validate_trace({15, {5, 11}, {0, 0}}),
                       doctest::Contains("period 2"), InfeasibleError);
  CHECK_THROWS_AS(validate_trace({0, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_trace({3, {1, 1}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_trace({3, {-1}, {0}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_trace({kMaxLevel + 1, {0, 0}, {0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_trace({kMaxLevel, {0, 0}, {1, 0}}),
                  std::invalid_argument);
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(Params{0.5, 0.0}.validate());
  CHECK_NOTHROW(Params{0.5, 1.0}.validate());
  CHECK_THROWS_AS(Params{0.0, 0.5}.validate(), std::domain_error);
  CHECK_THROWS_AS(Params{1.0, -0.1}.validate(), std::domain_error);
  CHECK_THROWS_AS(Params{1.0, 1.1}.validate(), std::domain_error);
}

}  // TEST_SUITE
