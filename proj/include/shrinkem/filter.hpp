#pragma once

#include <cstddef>
#include <vector>

#include "shrinkem/core_model.hpp"

namespace shrinkem {

/// Probability distribution over the inventory level at the end of one
/// period, conditional on everything observed so far. Stored densely over a
/// contiguous support [lo, hi]; the support widens by at most one level per
/// period (losses are 0 or 1).
struct Belief {
  std::size_t period = 0;  // 1-based
  Units lo = 0;
  std::vector<double> mass;

  Units hi() const { return lo + static_cast<Units>(mass.size()) - 1; }
  double prob_at(Units level) const;
};

enum class FilterMode {
  bayes,  // full measurement update: prior reweighted by Pr(S_t | I_{t-1})
  paper,  // plain kernel mixture with infeasible prior mass masked out
};

struct BeliefSeries {
  std::vector<Belief> beliefs;  // t = 1..T
  Trajectory mmle;              // per-period argmax, ties to the larger level
};

/// Belief over I_1: the transition kernel from the known initial level.
Belief initial_belief(const ObservedTrace& trace, const Params& params);

/// One step of the kernel-mixture recursion: prior mass on levels below S_t
/// (where the kernel is undefined) is removed and the remainder renormalized
/// before mixing. t is the 1-based target period.
Belief propagate_paper(const Belief& prev, std::size_t t,
                       const ObservedTrace& trace, const Params& params);

/// One step of the exact Bayes filter: each prior level is additionally
/// weighted by the likelihood of the observed sales from that level. Matches
/// brute-force conditional marginals; propagate_paper does not in general.
Belief propagate_bayes(const Belief& prev, std::size_t t,
                       const ObservedTrace& trace, const Params& params);

/// Per-period argmax of the belief mass, ties broken toward the larger
/// level.
Trajectory mmle_path(const std::vector<Belief>& beliefs);

BeliefSeries run_filter(const ObservedTrace& trace, const Params& params,
                        FilterMode mode = FilterMode::bayes);

}  // namespace shrinkem
