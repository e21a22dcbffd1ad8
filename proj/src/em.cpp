#include "shrinkem/em.hpp"

#include <cmath>
#include <numeric>

namespace shrinkem {

void EMOptions::validate() const {
  if (sigma0 && !(*sigma0 > 0.0)) throw std::domain_error("sigma0 must be > 0");
  if (!(lambda0 >= 0.0 && lambda0 <= 1.0)) {
    throw std::domain_error("lambda0 must lie in [0, 1]");
  }
  if (!(tol_sigma > 0.0 && tol_lambda > 0.0)) {
    throw std::domain_error("tolerances must be > 0");
  }
  if (max_iters < 1) throw std::domain_error("max_iters must be >= 1");
  mstep.validate();
}

Params default_init(const ObservedTrace& trace) {
  if (trace.sales.empty()) {
    throw std::invalid_argument("trace must cover at least one period");
  }
  const double total = static_cast<double>(
      std::accumulate(trace.sales.begin(), trace.sales.end(), Units{0}));
  const double mean = total / static_cast<double>(trace.horizon());
  return {std::max(mean, 1e-3), 0.5};
}

EMResult run_em(const ObservedTrace& trace, const EMOptions& options) {
  options.validate();
  validate_trace(trace);

  Params cur{options.sigma0.value_or(default_init(trace).sigma),
             options.lambda0};
  EMResult res;
  for (int k = 1; k <= options.max_iters; ++k) {
    auto [traj, fit] = estimate_trajectory(trace, cur, options.exec);
    res.loglik_history.push_back(fit);

    const ScalarEstimate s = maximize_sigma(traj, trace, cur.sigma,
                                            options.mstep);
    const ScalarEstimate l = maximize_lambda(traj, trace, cur.lambda,
                                             options.mstep);
    const Params next{s.value, l.value};
    res.loglik_history.push_back(trajectory_loglik(traj, trace, next));
    res.trajectory = std::move(traj);
    res.iterations = k;

    const bool settled = std::abs(next.sigma - cur.sigma) < options.tol_sigma &&
                         std::abs(next.lambda - cur.lambda) < options.tol_lambda;
    cur = next;
    if (settled) {
      res.converged = true;
      break;
    }
  }
  res.sigma_star = cur.sigma;
  res.lambda_star = cur.lambda;
  return res;
}

}  // namespace shrinkem
