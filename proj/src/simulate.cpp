#include "shrinkem/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shrinkem {

void SimConfig::validate() const {
  if (initial_inventory < 0 || initial_inventory > kMaxLevel) {
    throw std::domain_error("initial inventory outside [0, 2^31]");
  }
  if (!(sigma_true > 0.0)) throw std::domain_error("sigma must be > 0");
  if (!(lambda_true >= 0.0 && lambda_true <= 1.0)) {
    throw std::domain_error("lambda must lie in [0, 1]");
  }
  if (horizon < 2) throw std::domain_error("horizon must be >= 2");
  if (order_qty < 1) throw std::domain_error("order quantity must be >= 1");
  if (reorder_point < 0) throw std::domain_error("reorder point must be >= 0");
}

ObservedTrace SimOutcome::trace() const {
  return {config.initial_inventory, sales, replenishments};
}

Units poisson_from_uniform(double u, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("u must lie in [0, 1)");
  double pmf = std::exp(-sigma);
  double cdf = pmf;
  Units k = 0;
  while (u >= cdf) {
    ++k;
    pmf *= sigma / static_cast<double>(k);
    cdf += pmf;
    if (pmf <= 0.0) break;  // CDF saturated; u was in the far tail
  }
  return k;
}

Units sample_poisson(UniformStream& stream, double sigma) {
  return poisson_from_uniform(stream.next(), sigma);
}

SimOutcome simulate(const SimConfig& config) {
  config.validate();
  UniformStream rng(config.seed);

  SimOutcome out;
  out.config = config;
  out.sales.reserve(config.horizon);
  out.losses.reserve(config.horizon);
  out.replenishments.reserve(config.horizon);
  out.true_inventory.reserve(config.horizon);
  out.recorded_inventory.reserve(config.horizon);

  Units physical = config.initial_inventory;
  Units recorded = config.initial_inventory;
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const Units demand = sample_poisson(rng, config.sigma_true);
    const Units sold = std::min(demand, physical);
    const Units loss_draw = rng.next() < config.lambda_true ? 1 : 0;
    const Units lost = std::min(loss_draw, physical - sold);
    const Units recorded_after_sales = recorded - sold;
    const Units order =
        recorded_after_sales <= config.reorder_point ? config.order_qty : 0;
    physical = physical - sold - lost + order;
    recorded = recorded_after_sales + order;

    out.sales.push_back(sold);
    out.losses.push_back(lost);
    out.replenishments.push_back(order);
    out.true_inventory.push_back(physical);
    out.recorded_inventory.push_back(recorded);
  }

  const FreezeInfo info = detect_freeze(out);
  out.froze = info.froze;
  out.freeze_period = info.period;
  return out;
}

FreezeInfo detect_freeze(const SimOutcome& outcome) {
  const std::size_t periods = outcome.true_inventory.size();
  if (outcome.recorded_inventory.size() != periods) {
    throw std::invalid_argument("incomplete outcome");
  }
  for (std::size_t t = 1; t <= periods; ++t) {
    if (outcome.true_inventory[t - 1] == 0 &&
        outcome.recorded_inventory[t - 1] > outcome.config.reorder_point) {
      // Zero stock means zero sales, so the recorded level never drops back
      // to the trigger and the state persists through the horizon.
      for (std::size_t u = t; u <= periods; ++u) {
        if (outcome.true_inventory[u - 1] != 0 ||
            outcome.recorded_inventory[u - 1] !=
                outcome.recorded_inventory[t - 1]) {
          throw std::logic_error("freeze state did not persist");
        }
      }
      return {true, t};
    }
  }
  return {false, std::nullopt};
}

}  // namespace shrinkem
