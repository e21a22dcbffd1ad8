#pragma once

#include <cstdint>

#include "shrinkem/core_model.hpp"

namespace shrinkem {

/// Controls the per-parameter maximizers.
///
/// robust: coarse log-spaced grid scan plus golden-section refinement for
/// sigma, closed form for lambda. gradient20 mirrors the classic setup of
/// 20 gradient-ascent steps with a backtracking line search; it exists for
/// fidelity with that procedure and converges to the same optima.
struct MStepOptions {
  enum class Mode { robust, gradient20 };

  Mode mode = Mode::robust;
  double sigma_lo = 1e-6;
  double sigma_hi = 0.0;  // <= 0: use 2 * (max sales + 1)
  double tolerance = 1e-3;
  double lambda_clamp = 1e-6;  // lambda kept inside [eps, 1 - eps]

  void validate() const;
};

struct ScalarEstimate {
  double value = 0.0;
  bool at_boundary = false;
};

/// Counts of loss and no-loss periods among those with headroom >= 1
/// (periods with zero headroom carry no information about lambda).
struct LossCounts {
  std::int64_t losses = 0;  // n1
  std::int64_t keeps = 0;   // n0
};

/// The sigma-only component of the trajectory log-likelihood:
/// sum over t of log Pr(S_t | I_{t-1}; sigma).
LogLik sales_loglik(double sigma, const Trajectory& trajectory,
                    const ObservedTrace& trace);

/// The lambda-only component: sum over t of
/// log Pr(I_t | I_{t-1}, S_t, R_t; lambda). Equals
/// n1 * log(lambda) + n0 * log(1 - lambda).
LogLik loss_loglik(double lambda, const Trajectory& trajectory,
                   const ObservedTrace& trace);

LossCounts loss_counts(const Trajectory& trajectory,
                       const ObservedTrace& trace);

/// d/dsigma of sales_loglik: uncensored periods contribute -1 + S_t/sigma,
/// censored ones pmf(I_{t-1} - 1; sigma) / P(X >= I_{t-1}; sigma).
double sigma_gradient(double sigma, const Trajectory& trajectory,
                      const ObservedTrace& trace);

/// Maximizes sales_loglik over sigma. Never returns a point scoring below
/// sigma_in. If the objective carries no information (all periods have zero
/// stock), returns sigma_in with the boundary flag set.
ScalarEstimate maximize_sigma(const Trajectory& trajectory,
                              const ObservedTrace& trace, double sigma_in,
                              const MStepOptions& options = {});

/// Maximizes loss_loglik over lambda: n1 / (n0 + n1) clamped away from the
/// hard boundaries, or sigma-style gradient ascent in gradient20 mode. With
/// no informative periods, returns lambda_in with the boundary flag set.
ScalarEstimate maximize_lambda(const Trajectory& trajectory,
                               const ObservedTrace& trace, double lambda_in,
                               const MStepOptions& options = {});

}  // namespace shrinkem
