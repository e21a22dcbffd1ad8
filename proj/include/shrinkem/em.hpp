#pragma once

#include <optional>
#include <vector>

#include "shrinkem/core_model.hpp"
#include "shrinkem/estep.hpp"
#include "shrinkem/mstep.hpp"

namespace shrinkem {

struct EMOptions {
  std::optional<double> sigma0;  // empty: mean of the observed sales
  double lambda0 = 0.5;
  double tol_sigma = 0.01;
  double tol_lambda = 0.01;
  int max_iters = 100;
  MStepOptions mstep;
  DpExec exec = DpExec::serial;

  void validate() const;
};

struct EMResult {
  double sigma_star = 0.0;
  double lambda_star = 0.0;
  Trajectory trajectory;
  int iterations = 0;
  std::vector<double> loglik_history;  // after each E- and each M-step
  bool converged = false;
};

/// Default starting point: sigma = average of the sales over the horizon
/// (stock-out periods included), floored at 1e-3; lambda = 0.5.
Params default_init(const ObservedTrace& trace);

/// Hard (Viterbi) EM: the E-step is an argmax over hidden trajectories, not
/// a posterior expectation, so the usual soft-EM guarantees do not apply.
/// Alternates estimate_trajectory with the two separable maximizers until
/// both parameter changes fall below their tolerances or max_iters is hit.
EMResult run_em(const ObservedTrace& trace, const EMOptions& options = {});

}  // namespace shrinkem
