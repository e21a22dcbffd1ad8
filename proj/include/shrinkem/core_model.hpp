#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace shrinkem {

/// Log-probabilities are plain doubles; -infinity marks an impossible event.
using LogLik = double;
inline constexpr LogLik kLogZero = -std::numeric_limits<double>::infinity();

/// Inventory levels and unit counts are 64-bit; validation rejects levels
/// above kMaxLevel.
using Units = std::int64_t;
inline constexpr Units kMaxLevel = Units{1} << 31;

/// Observed data that no hidden history can explain (as opposed to malformed
/// input). The CLI maps this to exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sale-rate and loss-probability pair.
struct Params {
  double sigma = 1.0;   // expected sales per period, > 0
  double lambda = 0.0;  // per-period loss probability, in [0, 1]

  void validate() const;
};

/// Initial inventory level plus per-period sales and replenishments.
/// Periods are 1-based: sales[t - 1] is the t-th period's sales.
struct ObservedTrace {
  Units initial_inventory = 0;
  std::vector<Units> sales;
  std::vector<Units> replenishments;

  std::size_t horizon() const { return sales.size(); }
};

/// Candidate hidden inventory history (levels at the end of periods 1..T).
using Trajectory = std::vector<Units>;

/// log Pr(sales = s | previous inventory = i_prev) under a Poisson demand
/// with rate sigma, truncated at the available stock: the plain pmf when
/// s < i_prev, the upper tail P(X >= i_prev) when s == i_prev, impossible
/// when s > i_prev. Stable for counts up to ~10^6.
LogLik trunc_poisson_logpmf(Units s, Units i_prev, double sigma);

/// log Pr(loss = l | headroom) for a Bernoulli(lambda) loss truncated at the
/// post-sales headroom: zero headroom forces l = 0.
LogLik trunc_bernoulli_logpmf(Units l, Units headroom, double lambda);

struct LevelRange {
  Units lo = 0;
  Units hi = 0;
};

/// Range of next-period inventory levels consistent with a per-period loss
/// of 0 or 1: max{r, i_prev - s + r - 1} <= i_next <= i_prev - s + r.
/// Always satisfies lo <= hi <= lo + 1.
LevelRange feasible_range(Units i_prev, Units s, Units r);

/// log Pr(I_t = i_next | I_{t-1} = i_prev, S_t = s, R_t = r). The implied
/// loss is i_prev - s + r - i_next; anything outside {0, 1} (or a loss with
/// no headroom) scores -infinity.
LogLik transition_logprob(Units i_prev, Units s, Units r, Units i_next,
                          double lambda);

/// Joint log-probability of period t's observed sales and the move
/// i_prev -> i_next, i.e. the per-period term of the trajectory
/// log-likelihood. t is 1-based.
LogLik step_score(Units i_prev, Units i_next, std::size_t t,
                  const ObservedTrace& trace, const Params& params);

/// Sum of step scores along a full trajectory; -infinity iff any step is
/// infeasible.
LogLik trajectory_loglik(const Trajectory& trajectory,
                         const ObservedTrace& trace, const Params& params);

/// Rejects traces no hidden history can produce: negative entries, counts
/// above kMaxLevel, or sales exceeding the running upper bound
/// I_t^max = I_{t-1}^max - S_t + R_t. Throws InfeasibleError naming the
/// first offending period.
void validate_trace(const ObservedTrace& trace);

}  // namespace shrinkem
