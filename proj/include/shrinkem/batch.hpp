#pragma once

#include <cstdint>
#include <vector>

#include "shrinkem/em.hpp"
#include "shrinkem/simulate.hpp"

namespace shrinkem {

/// Seed sweeps and multi-trace fits. Every element is computed from its own
/// inputs alone, so the parallel (OpenMP) path returns results bit-identical
/// to the serial loop; serial remains the reference the tests compare
/// against.

std::vector<SimOutcome> simulate_batch(const SimConfig& base,
                                       const std::vector<std::uint64_t>& seeds,
                                       bool parallel = true);

std::vector<EMResult> run_em_batch(const std::vector<ObservedTrace>& traces,
                                   const EMOptions& options = {},
                                   bool parallel = true);

}  // namespace shrinkem
