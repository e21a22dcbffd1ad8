#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "shrinkem/core_model.hpp"

namespace shrinkem {

/// Setup of one naive-bookkeeping (Q, R) simulation.
struct SimConfig {
  Units initial_inventory = 15;
  double sigma_true = 5.0;
  double lambda_true = 0.25;
  std::size_t horizon = 60;
  Units order_qty = 20;
  Units reorder_point = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ground-truth record of one simulation. recorded_inventory follows the
/// naive recursion I_t = I_{t-1} - S_t + R_t; true_inventory additionally
/// subtracts the unrecorded losses.
struct SimOutcome {
  SimConfig config;
  std::vector<Units> sales;
  std::vector<Units> losses;
  std::vector<Units> replenishments;
  std::vector<Units> true_inventory;
  std::vector<Units> recorded_inventory;
  bool froze = false;
  std::optional<std::size_t> freeze_period;  // 1-based

  /// The observable part, as the estimator sees it.
  ObservedTrace trace() const;
};

/// Uniform(0,1) stream: mt19937_64 with the top 53 bits of each output,
/// u = (x >> 11) * 2^-53. Bit-stable across platforms.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : gen_(seed) {}
  double next() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 gen_;
};

/// Smallest k with CDF(k) >= u, found by sequential search. One uniform per
/// variate, so the draw is fully determined by the stream.
Units poisson_from_uniform(double u, double sigma);

Units sample_poisson(UniformStream& stream, double sigma);

/// Runs the naive system: Poisson demand capped by true stock, at most one
/// unrecorded Bernoulli loss per period, and an order of Q placed whenever
/// the post-sales recorded level reaches the reorder point (arriving at the
/// end of the same period). Two uniforms per period, sales then loss.
SimOutcome simulate(const SimConfig& config);

struct FreezeInfo {
  bool froze = false;
  std::optional<std::size_t> period;
};

/// First period whose true stock is zero while the recorded level still
/// exceeds the reorder point. Once reached the state persists, which is
/// asserted.
FreezeInfo detect_freeze(const SimOutcome& outcome);

}  // namespace shrinkem
