#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "shrinkem/core_model.hpp"

namespace shrinkem {

/// Policy entry for cells with no feasible successor.
inline constexpr Units kNoSuccessor = -1;

/// Trellis tables of the maximum-likelihood trajectory search.
/// value[t][i] is the best achievable log-likelihood of periods t+1..T given
/// I_t = i; policy[t][i] is the successor attaining it. value[T] is
/// identically zero. The counters record work done, for complexity checks.
struct DpTables {
  std::vector<Units> upper_bounds;         // I_t^max for t = 0..T
  std::vector<std::vector<double>> value;  // t = 0..T, indexed by level
  std::vector<std::vector<Units>> policy;  // t = 0..T-1, indexed by level
  std::int64_t cells = 0;
  std::int64_t successor_evals = 0;
};

enum class DpExec { serial, parallel };

/// Running upper bounds (I_0^max, ..., I_T^max) with
/// I_t^max = I_{t-1}^max - S_t + R_t. Requires a validated trace.
std::vector<Units> compute_upper_bounds(const ObservedTrace& trace);

/// Backward sweep of the trellis. Each cell examines at most two successors
/// (loss of 0 or 1). Per-period score constants are hoisted out of the cell
/// loop; DpExec::parallel additionally splits wide periods across OpenMP
/// threads. Results are bit-identical across both modes.
DpTables backward_pass(const ObservedTrace& trace, const Params& params,
                       DpExec exec = DpExec::serial);

/// Unoptimized per-cell composition of step_score, kept as the reference
/// the hoisted kernel is tested against.
DpTables backward_pass_reference(const ObservedTrace& trace,
                                 const Params& params);

/// Follows the policy from the initial inventory level. Throws
/// InfeasibleError if the start cell is unreachable.
Trajectory forward_pass(const DpTables& tables, const ObservedTrace& trace);

/// Maximum-likelihood feasible trajectory for fixed parameters (the E-step):
/// backward then forward pass. The returned log-likelihood is the direct
/// trajectory_loglik of the result, cross-checked against the DP value.
std::pair<Trajectory, LogLik> estimate_trajectory(
    const ObservedTrace& trace, const Params& params,
    DpExec exec = DpExec::serial);

}  // namespace shrinkem
