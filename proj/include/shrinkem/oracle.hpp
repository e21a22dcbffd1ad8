#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "shrinkem/core_model.hpp"

namespace shrinkem {

/// Brute-force helpers for validating the DP, the M-step and the filter at
/// toy scale. They ship in the library so the CLI can cross-check real runs
/// on small inputs, not just the test suite.

struct EnumerationLimit {
  std::size_t max_horizon = 24;
  std::size_t max_states = 1000000;
};

/// Every trajectory satisfying the per-step feasibility bounds (at most two
/// choices per period, so at most 2^T results). Throws when the limits are
/// exceeded.
std::vector<Trajectory> enumerate_feasible(const ObservedTrace& trace,
                                           const EnumerationLimit& limit = {});

/// Exhaustive argmax of trajectory_loglik over enumerate_feasible. Ties are
/// broken toward the lexicographically larger trajectory, matching the DP's
/// larger-successor rule.
std::pair<Trajectory, LogLik> brute_force_mle(
    const ObservedTrace& trace, const Params& params,
    const EnumerationLimit& limit = {});

/// Argmax of f over a uniform grid on [lo, hi]; ties toward the larger
/// abscissa.
double grid_maximize(const std::function<double(double)>& f, double lo,
                     double hi, std::size_t points);

/// Central difference (f(x + h) - f(x - h)) / 2h.
double finite_difference(const std::function<double(double)>& f, double x,
                         double h);

}  // namespace shrinkem
