#include "shrinkem/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace shrinkem {
namespace {

void extend(const ObservedTrace& trace, const EnumerationLimit& limit,
            Trajectory& prefix, Units prev, std::vector<Trajectory>& out) {
  if (prefix.size() == trace.horizon()) {
    if (out.size() >= limit.max_states) {
      throw std::runtime_error("enumeration limit exceeded");
    }
    out.push_back(prefix);
    return;
  }
  const std::size_t t = prefix.size();
  const Units s = trace.sales[t];
  if (s > prev) return;  // dead branch
  const LevelRange range = feasible_range(prev, s, trace.replenishments[t]);
  for (Units cand = range.hi; cand >= range.lo; --cand) {
    prefix.push_back(cand);
    extend(trace, limit, prefix, cand, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Trajectory> enumerate_feasible(const ObservedTrace& trace,
                                           const EnumerationLimit& limit) {
  validate_trace(trace);
  if (trace.horizon() > limit.max_horizon) {
    throw std::runtime_error("enumeration limit exceeded");
  }
  std::vector<Trajectory> out;
  Trajectory prefix;
  prefix.reserve(trace.horizon());
  extend(trace, limit, prefix, trace.initial_inventory, out);
  return out;
}

std::pair<Trajectory, LogLik> brute_force_mle(const ObservedTrace& trace,
                                              const Params& params,
                                              const EnumerationLimit& limit) {
  params.validate();
  const std::vector<Trajectory> all = enumerate_feasible(trace, limit);
  const Trajectory* best = nullptr;
  LogLik best_score = kLogZero;
  for (const Trajectory& traj : all) {
    const LogLik score = trajectory_loglik(traj, trace, params);
    if (score == kLogZero) continue;
    if (best == nullptr || score > best_score ||
        (score == best_score &&
         std::lexicographical_compare(best->begin(), best->end(),
                                      traj.begin(), traj.end()))) {
      best = &traj;
      best_score = score;
    }
  }
  if (best == nullptr) throw InfeasibleError("model-infeasible trace");
  return {*best, best_score};
}

double grid_maximize(const std::function<double(double)>& f, double lo,
                     double hi, std::size_t points) {
  if (!(lo < hi)) throw std::domain_error("grid requires lo < hi");
  if (points < 2) throw std::domain_error("grid requires >= 2 points");
  double best_x = lo;
  double best_f = f(lo);
  for (std::size_t j = 1; j < points; ++j) {
    const double x =
        lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
    const double fx = f(x);
    if (fx >= best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return best_x;
}

double finite_difference(const std::function<double(double)>& f, double x,
                         double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace shrinkem
