#include "shrinkem/core_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace shrinkem {
namespace {

constexpr std::size_t kLogFactTableSize = 2048;

const std::array<double, kLogFactTableSize>& log_fact_table() {
  static const auto table = [] {
    std::array<double, kLogFactTableSize> t{};
    long double acc = 0.0L;
    for (std::size_t n = 1; n < kLogFactTableSize; ++n) {
      acc += std::log(static_cast<long double>(n));
      t[n] = static_cast<double>(acc);
    }
    return t;
  }();
  return table;
}

double log_factorial(Units n) {
  if (n < static_cast<Units>(kLogFactTableSize)) {
    return log_fact_table()[static_cast<std::size_t>(n)];
  }
  int sign = 0;  // lgamma_r keeps this thread-safe, unlike std::lgamma
  return lgamma_r(static_cast<double>(n) + 1.0, &sign);
}

double poisson_logpmf(Units k, double sigma) {
  return -sigma + static_cast<double>(k) * std::log(sigma) - log_factorial(k);
}

// log P(X >= i) for X ~ Poisson(sigma). Two routes: when the lower CDF is
// small, log1p(-cdf); otherwise the tail is summed directly in log space,
// so neither side suffers cancellation.
double poisson_tail_log(Units i, double sigma) {
  if (i <= 0) return 0.0;
  double pmf = std::exp(-sigma);
  double cdf = pmf;
  for (Units k = 1; k < i; ++k) {
    pmf *= sigma / static_cast<double>(k);
    cdf += pmf;
    if (static_cast<double>(k) > sigma && pmf < cdf * 1e-20) break;
  }
  if (cdf < 0.5) return std::log1p(-cdf);
  const double lead = poisson_logpmf(i, sigma);
  double ratio = 1.0;
  double series = 1.0;
  for (Units k = i + 1;; ++k) {
    ratio *= sigma / static_cast<double>(k);
    series += ratio;
    if (ratio < series * 1e-19) break;
  }
  return lead + std::log(series);
}

}  // namespace

void Params::validate() const {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("lambda must lie in [0, 1]");
  }
}

LogLik trunc_poisson_logpmf(Units s, Units i_prev, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  if (s < 0 || i_prev < 0) throw std::domain_error("counts must be >= 0");
  if (s > i_prev) return kLogZero;
  if (s < i_prev) return poisson_logpmf(s, sigma);
  return poisson_tail_log(i_prev, sigma);
}

LogLik trunc_bernoulli_logpmf(Units l, Units headroom, double lambda) {
  if (l != 0 && l != 1) throw std::domain_error("loss must be 0 or 1");
  if (headroom < 0) throw std::domain_error("headroom must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("lambda must lie in [0, 1]");
  }
  if (headroom == 0) return l == 0 ? 0.0 : kLogZero;
  return l == 1 ? std::log(lambda) : std::log1p(-lambda);
}

LevelRange feasible_range(Units i_prev, Units s, Units r) {
  if (s > i_prev) {
    throw InfeasibleError("infeasible step: sales exceed previous inventory");
  }
  const Units hi = i_prev - s + r;
  return {std::max(r, hi - 1), hi};
}

LogLik transition_logprob(Units i_prev, Units s, Units r, Units i_next,
                          double lambda) {
  if (s > i_prev) {
    throw InfeasibleError("infeasible step: sales exceed previous inventory");
  }
  const Units loss = i_prev - s + r - i_next;
  if (loss < 0 || loss > 1) return kLogZero;
  return trunc_bernoulli_logpmf(loss, i_prev - s, lambda);
}

LogLik step_score(Units i_prev, Units i_next, std::size_t t,
                  const ObservedTrace& trace, const Params& params) {
  if (t < 1 || t > trace.horizon()) {
    throw std::out_of_range("period index out of range");
  }
  const Units s = trace.sales[t - 1];
  const Units r = trace.replenishments[t - 1];
  if (s > i_prev) return kLogZero;
  const LogLik sale = trunc_poisson_logpmf(s, i_prev, params.sigma);
  const LogLik move = transition_logprob(i_prev, s, r, i_next, params.lambda);
  return sale + move;
}

LogLik trajectory_loglik(const Trajectory& trajectory,
                         const ObservedTrace& trace, const Params& params) {
  if (trajectory.size() != trace.horizon()) {
    throw std::invalid_argument("trajectory length does not match trace");
  }
  LogLik total = 0.0;
  Units prev = trace.initial_inventory;
  for (std::size_t t = 1; t <= trajectory.size(); ++t) {
    total += step_score(prev, trajectory[t - 1], t, trace, params);
    if (total == kLogZero) return kLogZero;
    prev = trajectory[t - 1];
  }
  return total;
}

void validate_trace(const ObservedTrace& trace) {
  if (trace.sales.empty()) {
    throw std::invalid_argument("trace must cover at least one period");
  }
  if (trace.sales.size() != trace.replenishments.size()) {
    throw std::invalid_argument(
        "sales and replenishments must have equal length");
  }
  if (trace.initial_inventory < 0 || trace.initial_inventory > kMaxLevel) {
    throw std::invalid_argument("initial inventory outside [0, 2^31]");
  }
  Units bound = trace.initial_inventory;
  for (std::size_t t = 1; t <= trace.sales.size(); ++t) {
    const Units s = trace.sales[t - 1];
    const Units r = trace.replenishments[t - 1];
    if (s < 0 || r < 0) {
      throw std::invalid_argument("negative entry at period " +
                                  std::to_string(t));
    }
    if (s > kMaxLevel || r > kMaxLevel) {
      throw std::invalid_argument("entry exceeds 2^31 at period " +
                                  std::to_string(t));
    }
    if (s > bound) {
      throw InfeasibleError("infeasible trace at period " + std::to_string(t) +
                            ": sales exceed any feasible stock");
    }
    bound = bound - s + r;
    if (bound > kMaxLevel) {
      throw std::invalid_argument("inventory bound exceeds 2^31 at period " +
                                  std::to_string(t));
    }
  }
}

}  // namespace shrinkem
