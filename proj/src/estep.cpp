#include "shrinkem/estep.hpp"

#include <cmath>
#include <stdexcept>

namespace shrinkem {
namespace {

// Rows narrower than this are not worth forking threads for.
constexpr Units kParallelMinWidth = 4096;

// Per-period score constants. The truncated-Poisson factor depends on the
// previous level only through censoring, and the Bernoulli factor only
// through zero headroom, so one period needs just four numbers.
struct StepConstants {
  double sale_uncensored;  // log pmf(S_t; sigma), any level above S_t
  double sale_censored;    // log P(X >= S_t; sigma), the level == S_t cell
  double keep;             // log Pr(L = 0 | headroom >= 1)
  double lose;             // log Pr(L = 1 | headroom >= 1)
};

StepConstants step_constants(Units s, const Params& params) {
  return {
      trunc_poisson_logpmf(s, s + 1, params.sigma),
      trunc_poisson_logpmf(s, s, params.sigma),
      trunc_bernoulli_logpmf(0, 1, params.lambda),
      trunc_bernoulli_logpmf(1, 1, params.lambda),
  };
}

DpTables make_tables(const ObservedTrace& trace) {
  DpTables tb;
  tb.upper_bounds = compute_upper_bounds(trace);
  const std::size_t periods = trace.horizon();
  tb.value.resize(periods + 1);
  tb.policy.resize(periods);
  tb.value[periods].assign(
      static_cast<std::size_t>(tb.upper_bounds[periods]) + 1, 0.0);
  return tb;
}

}  // namespace

std::vector<Units> compute_upper_bounds(const ObservedTrace& trace) {
  validate_trace(trace);
  std::vector<Units> bounds(trace.horizon() + 1);
  bounds[0] = trace.initial_inventory;
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    bounds[t] = bounds[t - 1] - trace.sales[t - 1] + trace.replenishments[t - 1];
  }
  return bounds;
}

DpTables backward_pass(const ObservedTrace& trace, const Params& params,
                       DpExec exec) {
  params.validate();
  DpTables tb = make_tables(trace);
  for (std::size_t t = trace.horizon(); t-- > 0;) {
    const Units s = trace.sales[t];
    const Units r = trace.replenishments[t];
    const StepConstants c = step_constants(s, params);
    const Units width = tb.upper_bounds[t] + 1;
    auto& val = tb.value[t];
    auto& pol = tb.policy[t];
    val.assign(static_cast<std::size_t>(width), kLogZero);
    pol.assign(static_cast<std::size_t>(width), kNoSuccessor);
    const std::vector<double>& next = tb.value[t + 1];
    std::int64_t evals = 0;
    const bool par = exec == DpExec::parallel && width >= kParallelMinWidth;
#pragma omp parallel for schedule(static) reduction(+ : evals) if (par)
    for (Units i = 0; i < width; ++i) {
      if (s > i) continue;  // zero sale probability at this level
      const Units hi = i - s + r;
      if (i == s) {
        // Zero headroom: the loss is forced to 0 with probability 1.
        val[i] = c.sale_censored + next[hi];
        pol[i] = val[i] == kLogZero ? kNoSuccessor : hi;
        evals += 1;
        continue;
      }
      // Ties go to the larger successor, i.e. the no-loss move.
      const double keep_score = (c.sale_uncensored + c.keep) + next[hi];
      const double lose_score = (c.sale_uncensored + c.lose) + next[hi - 1];
      evals += 2;
      double best = keep_score;
      Units arg = hi;
      if (lose_score > best) {
        best = lose_score;
        arg = hi - 1;
      }
      val[i] = best;
      pol[i] = best == kLogZero ? kNoSuccessor : arg;
    }
    tb.cells += width;
    tb.successor_evals += evals;
  }
  return tb;
}

DpTables backward_pass_reference(const ObservedTrace& trace,
                                 const Params& params) {
  params.validate();
  DpTables tb = make_tables(trace);
  for (std::size_t t = trace.horizon(); t-- > 0;) {
    const Units s = trace.sales[t];
    const Units r = trace.replenishments[t];
    const Units width = tb.upper_bounds[t] + 1;
    auto& val = tb.value[t];
    auto& pol = tb.policy[t];
    val.assign(static_cast<std::size_t>(width), kLogZero);
    pol.assign(static_cast<std::size_t>(width), kNoSuccessor);
    const std::vector<double>& next = tb.value[t + 1];
    for (Units i = 0; i < width; ++i) {
      if (s > i) continue;
      const LevelRange range = feasible_range(i, s, r);
      double best = kLogZero;
      Units arg = kNoSuccessor;
      for (Units cand = range.hi; cand >= range.lo; --cand) {
        const double score =
            step_score(i, cand, t + 1, trace, params) + next[cand];
        tb.successor_evals += 1;
        if (score > best) {
          best = score;
          arg = cand;
        }
      }
      val[i] = best;
      pol[i] = best == kLogZero ? kNoSuccessor : arg;
    }
    tb.cells += width;
  }
  return tb;
}

Trajectory forward_pass(const DpTables& tables, const ObservedTrace& trace) {
  const std::size_t periods = trace.horizon();
  if (tables.policy.size() != periods || tables.value.size() != periods + 1) {
    throw std::invalid_argument("DP tables do not match trace");
  }
  const Units start = trace.initial_inventory;
  if (tables.value[0][start] == kLogZero) {
    throw InfeasibleError("model-infeasible trace");
  }
  Trajectory out(periods);
  Units cur = start;
  for (std::size_t t = 0; t < periods; ++t) {
    const Units nxt = tables.policy[t][cur];
    if (nxt == kNoSuccessor) throw InfeasibleError("model-infeasible trace");
    out[t] = nxt;
    cur = nxt;
  }
  return out;
}

std::pair<Trajectory, LogLik> estimate_trajectory(const ObservedTrace& trace,
                                                  const Params& params,
                                                  DpExec exec) {
  const DpTables tb = backward_pass(trace, params, exec);
  Trajectory traj = forward_pass(tb, trace);
  const LogLik direct = trajectory_loglik(traj, trace, params);
  const LogLik dp_value = tb.value[0][trace.initial_inventory];
  if (!(std::abs(direct - dp_value) <=
        1e-9 * std::max(1.0, std::abs(dp_value)))) {
    throw std::logic_error("DP value does not certify the returned trajectory");
  }
  return {std::move(traj), direct};
}

}  // namespace shrinkem
