#include <cmath>
#include <random>

#include "doctest.h"
#include "shrinkem/estep.hpp"
#include "shrinkem/oracle.hpp"
#include "test_util.hpp"

using namespace shrinkem;

namespace {

bool tables_equal(const DpTables& a, const DpTables& b) {
  return a.upper_bounds == b.upper_bounds && a.value == b.value &&
         a.policy == b.policy && a.cells == b.cells &&
         a.successor_evals == b.successor_evals;
}

// Random feasible trajectory, for optimality-certificate sampling.
Trajectory random_feasible(std::mt19937_64& rng, const ObservedTrace& trace) {
  while (true) {
    Trajectory levels;
    Units prev = trace.initial_inventory;
    bool dead = false;
    for (std::size_t t = 0; t < trace.horizon(); ++t) {
      if (trace.sales[t] > prev) {
        dead = true;
        break;
      }
      const LevelRange range =
          feasible_range(prev, trace.sales[t], trace.replenishments[t]);
      const Units pick = range.lo == range.hi
                             ? range.lo
                             : (rng() % 2 == 0 ? range.lo : range.hi);
      levels.push_back(pick);
      prev = pick;
    }
    if (!dead) return levels;
  }
}

}  // namespace

TEST_SUITE("estep") {

TEST_CASE("upper bounds follow the running recursion") {
  CHECK(compute_upper_bounds({15, {5, 3}, {0, 20}}) ==
        std::vector<Units>{15, 10, 27});
  CHECK(compute_upper_bounds({0, {0, 0}, {4, 0}}) ==
        std::vector<Units>{0, 4, 4});
  CHECK(compute_upper_bounds({15, {5, 3, 6, 2}, {0, 20, 0, 0}}) ==
        std::vector<Units>{15, 10, 27, 21, 19});
  CHECK_THROWS_AS(compute_upper_bounds({2, {5}, {0}}), InfeasibleError);
}

TEST_CASE("backward pass on the two-period toy") {
  const ObservedTrace trace{3, {1, 1}, {0, 0}};
  const Params params{1.0, 0.25};
  const DpTables tb = backward_pass(trace, params);

  // Brute force over the three feasible trajectories puts (2, 1) on top.
  const auto [best, best_score] = brute_force_mle(trace, params);
  CHECK(best == Trajectory{2, 1});
  CHECK(tb.value[0][3] == doctest::Approx(best_score).epsilon(1e-14));
  CHECK(tb.value[0][3] ==
        doctest::Approx(2.0 * (-1.0 + std::log(0.75))).epsilon(1e-14));
  CHECK(tb.policy[0][3] == 2);
  CHECK(tb.policy[1][2] == 1);
  CHECK(tb.value[2] == std::vector<double>(tb.upper_bounds[2] + 1, 0.0));
}

TEST_CASE("lambda 0 forces the no-loss move everywhere") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 8, 12);
    const DpTables tb = backward_pass(trace, {2.5, 0.0});
    for (std::size_t t = 0; t < trace.horizon(); ++t) {
      for (Units i = 0; i <= tb.upper_bounds[t]; ++i) {
        if (tb.value[t][i] == kLogZero) continue;
        CHECK(tb.policy[t][i] ==
              i - trace.sales[t] + trace.replenishments[t]);
      }
    }
  }
}

TEST_CASE("lambda 1 forces the loss move wherever there is headroom") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 8, 12);
    const DpTables tb = backward_pass(trace, {2.5, 1.0});
    for (std::size_t t = 0; t < trace.horizon(); ++t) {
      for (Units i = 0; i <= tb.upper_bounds[t]; ++i) {
        if (tb.value[t][i] == kLogZero) continue;
        if (i - trace.sales[t] >= 1) {
          CHECK(tb.policy[t][i] ==
                i - trace.sales[t] + trace.replenishments[t] - 1);
        }
      }
    }
  }
}

TEST_CASE("forward pass") {
  const ObservedTrace toy{3, {1, 1}, {0, 0}};
  const Params params{1.0, 0.25};
  CHECK(forward_pass(backward_pass(toy, params), toy) == Trajectory{2, 1});

  // Single feasible point regardless of parameters.
  const ObservedTrace pin{1, {1}, {0}};
  CHECK(forward_pass(backward_pass(pin, {7.0, 0.9}), pin) == Trajectory{0});

  // lambda = 0: the trajectory is the naive recursion.
  std::mt19937_64 rng(13);
  const ObservedTrace trace = testutil::random_instance(rng, 6, 10);
  const Trajectory traj = forward_pass(backward_pass(trace, {2.0, 0.0}), trace);
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trace.horizon(); ++t) {
    CHECK(traj[t] == prev - trace.sales[t] + trace.replenishments[t]);
    prev = traj[t];
  }
}

TEST_CASE("a trace can be model-infeasible at a hard parameter boundary") {
  // lambda = 1 forces a loss wherever headroom exists, but losing a unit in
  // period 1 leaves nothing to sell in period 2.
  const ObservedTrace trace{2, {1, 1}, {0, 0}};
  CHECK_NOTHROW(validate_trace(trace));
  CHECK_THROWS_WITH_AS(estimate_trajectory(trace, {1.0, 1.0}).first,
                       "model-infeasible trace", InfeasibleError);
}

TEST_CASE("matches exhaustive search on random instances") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 200; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 8, 12);
    const Params params = testutil::random_params(rng);
    const auto [dp_traj, dp_score] = estimate_trajectory(trace, params);
    const auto [bf_traj, bf_score] = brute_force_mle(trace, params);
    CHECK(dp_traj == bf_traj);
    CHECK(std::abs(dp_score - bf_score) <= 1e-9);
  }
}

TEST_CASE("returned trajectory beats random feasible samples") {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 10; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 10, 12);
    const Params params = testutil::random_params(rng);
    const auto [best, best_score] = estimate_trajectory(trace, params);
    for (int draw = 0; draw < 1000; ++draw) {
      const Trajectory sample = random_feasible(rng, trace);
      CHECK(best_score >= trajectory_loglik(sample, trace, params) - 1e-9);
    }
  }
}

TEST_CASE("zero-headroom trace has a unique explanation") {
  const ObservedTrace trace{6, {2, 2, 2}, {0, 0, 0}};
  CHECK(enumerate_feasible(trace).size() == 1);
  const auto [traj, score] = estimate_trajectory(trace, {2.0, 0.25});
  CHECK(traj == Trajectory{4, 2, 0});
  CHECK(std::isfinite(score));
}

TEST_CASE("exact ties break toward the larger successor") {
  // At lambda = 0.5 both branches carry the same Bernoulli factor, and with
  // nothing downstream the scores tie exactly.
  const auto [traj, score] = estimate_trajectory({3, {1}, {0}}, {2.0, 0.5});
  CHECK(traj == Trajectory{2});

  const ObservedTrace two{5, {1, 1}, {0, 0}};
  const DpTables tb = backward_pass(two, {2.0, 0.5});
  for (Units i = 2; i <= 4; ++i) CHECK(tb.policy[1][i] == i - 1);
}

TEST_CASE("work counters scale with the trellis size") {
  std::mt19937_64 rng(16);
  for (int rep = 0; rep < 10; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 8, 12);
    const DpTables tb = backward_pass(trace, testutil::random_params(rng));
    std::int64_t expected_cells = 0;
    for (std::size_t t = 0; t < trace.horizon(); ++t) {
      expected_cells += tb.upper_bounds[t] + 1;
    }
    CHECK(tb.cells == expected_cells);
    CHECK(tb.successor_evals <= 2 * tb.cells);
  }
}

TEST_CASE("policy entries stay inside the feasible range") {
  std::mt19937_64 rng(17);
  const ObservedTrace trace = testutil::random_instance(rng, 8, 12, 4);
  const DpTables tb = backward_pass(trace, {3.0, 0.3});
  for (std::size_t t = 0; t < trace.horizon(); ++t) {
    for (Units i = 0; i <= tb.upper_bounds[t]; ++i) {
      if (tb.policy[t][i] == kNoSuccessor) continue;
      const LevelRange range =
          feasible_range(i, trace.sales[t], trace.replenishments[t]);
      CHECK(tb.policy[t][i] >= range.lo);
      CHECK(tb.policy[t][i] <= range.hi);
    }
  }
}

TEST_CASE("hoisted kernel equals the per-cell reference") {
  std::mt19937_64 rng(18);
  for (int rep = 0; rep < 30; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 10, 15);
    const Params params = testutil::random_params(rng, 0.5, 10.0, 0.0, 1.0);
    CHECK(tables_equal(backward_pass(trace, params),
                       backward_pass_reference(trace, params)));
  }
}

TEST_CASE("parallel execution is bit-identical to serial") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const ObservedTrace trace = testutil::random_instance(rng, 10, 15);
    const Params params = testutil::random_params(rng);
    CHECK(tables_equal(backward_pass(trace, params, DpExec::serial),
                       backward_pass(trace, params, DpExec::parallel)));
  }
  // Wide rows actually cross the parallel-dispatch threshold.
  ObservedTrace wide;
  wide.initial_inventory = 9000;
  for (int t = 0; t < 6; ++t) {
    wide.sales.push_back(40 + 7 * t);
    wide.replenishments.push_back(t % 2 == 0 ? 90 : 0);
  }
  const Params params{37.0, 0.2};
  CHECK(tables_equal(backward_pass(wide, params, DpExec::serial),
                     backward_pass(wide, params, DpExec::parallel)));
}

}  // TEST_SUITE
