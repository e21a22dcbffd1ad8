#include "shrinkem/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shrinkem {
namespace {

void check_period(const Belief& prev, std::size_t t,
                  const ObservedTrace& trace) {
  if (t < 2 || t > trace.horizon()) {
    throw std::out_of_range("period index out of range");
  }
  if (prev.period + 1 != t) {
    throw std::invalid_argument("belief period does not precede target");
  }
  if (prev.mass.empty()) throw std::invalid_argument("empty belief");
}

void normalize_and_trim(Belief& b, std::size_t t) {
  double total = 0.0;
  for (const double m : b.mass) total += m;
  if (!(total > 0.0)) {
    throw InfeasibleError("belief collapsed at period " + std::to_string(t));
  }
  for (double& m : b.mass) m /= total;
  std::size_t first = 0;
  std::size_t last = b.mass.size();
  while (first + 1 < last && b.mass[first] == 0.0) ++first;
  while (last > first + 1 && b.mass[last - 1] == 0.0) --last;
  if (first > 0 || last < b.mass.size()) {
    b.mass = std::vector<double>(b.mass.begin() + first, b.mass.begin() + last);
    b.lo += static_cast<Units>(first);
  }
}

// Mixes weighted prior levels through the transition kernel. Weights need
// not be normalized; the output is.
Belief mix_through_kernel(const std::vector<Units>& levels,
                          const std::vector<double>& weights, std::size_t t,
                          Units s, Units r, double lambda) {
  Units out_lo = kMaxLevel;
  Units out_hi = -1;
  for (const Units i : levels) {
    const LevelRange range = feasible_range(i, s, r);
    out_lo = std::min(out_lo, range.lo);
    out_hi = std::max(out_hi, range.hi);
  }
  Belief out;
  out.period = t;
  out.lo = out_lo;
  out.mass.assign(static_cast<std::size_t>(out_hi - out_lo + 1), 0.0);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const Units i = levels[k];
    const LevelRange range = feasible_range(i, s, r);
    for (Units j = range.lo; j <= range.hi; ++j) {
      out.mass[j - out_lo] +=
          weights[k] * std::exp(transition_logprob(i, s, r, j, lambda));
    }
  }
  normalize_and_trim(out, t);
  return out;
}

}  // namespace

double Belief::prob_at(Units level) const {
  if (level < lo || level > hi()) return 0.0;
  return mass[static_cast<std::size_t>(level - lo)];
}

Belief initial_belief(const ObservedTrace& trace, const Params& params) {
  params.validate();
  if (trace.sales.empty() ||
      trace.sales.size() != trace.replenishments.size()) {
    throw std::invalid_argument("malformed trace");
  }
  const Units i0 = trace.initial_inventory;
  const Units s = trace.sales[0];
  const Units r = trace.replenishments[0];
  if (s > i0) {
    throw InfeasibleError("infeasible first period: sales exceed initial inventory");
  }
  return mix_through_kernel({i0}, {1.0}, 1, s, r, params.lambda);
}

Belief propagate_paper(const Belief& prev, std::size_t t,
                       const ObservedTrace& trace, const Params& params) {
  params.validate();
  check_period(prev, t, trace);
  const Units s = trace.sales[t - 1];
  const Units r = trace.replenishments[t - 1];
  std::vector<Units> levels;
  std::vector<double> weights;
  double kept = 0.0;
  for (Units i = std::max(prev.lo, s); i <= prev.hi(); ++i) {
    const double m = prev.prob_at(i);
    if (m == 0.0) continue;
    levels.push_back(i);
    weights.push_back(m);
    kept += m;
  }
  if (levels.empty() || !(kept > 0.0)) {
    throw InfeasibleError("belief collapsed at period " + std::to_string(t));
  }
  for (double& w : weights) w /= kept;  // renormalize the masked prior
  return mix_through_kernel(levels, weights, t, s, r, params.lambda);
}

Belief propagate_bayes(const Belief& prev, std::size_t t,
                       const ObservedTrace& trace, const Params& params) {
  params.validate();
  check_period(prev, t, trace);
  const Units s = trace.sales[t - 1];
  const Units r = trace.replenishments[t - 1];
  std::vector<Units> levels;
  std::vector<double> weights;
  for (Units i = std::max(prev.lo, s); i <= prev.hi(); ++i) {
    const double m = prev.prob_at(i);
    if (m == 0.0) continue;
    const double w = m * std::exp(trunc_poisson_logpmf(s, i, params.sigma));
    if (w == 0.0) continue;
    levels.push_back(i);
    weights.push_back(w);
  }
  if (levels.empty()) {
    throw InfeasibleError("belief collapsed at period " + std::to_string(t));
  }
  return mix_through_kernel(levels, weights, t, s, r, params.lambda);
}

Trajectory mmle_path(const std::vector<Belief>& beliefs) {
  Trajectory out;
  out.reserve(beliefs.size());
  for (const Belief& b : beliefs) {
    if (b.mass.empty()) throw std::invalid_argument("empty belief");
    Units arg = b.lo;
    double best = b.mass[0];
    for (Units level = b.lo; level <= b.hi(); ++level) {
      const double m = b.prob_at(level);
      if (m >= best) {
        best = m;
        arg = level;
      }
    }
    out.push_back(arg);
  }
  return out;
}

BeliefSeries run_filter(const ObservedTrace& trace, const Params& params,
                        FilterMode mode) {
  params.validate();
  if (trace.sales.empty() ||
      trace.sales.size() != trace.replenishments.size()) {
    throw std::invalid_argument("malformed trace");
  }
  BeliefSeries series;
  series.beliefs.reserve(trace.horizon());
  series.beliefs.push_back(initial_belief(trace, params));
  for (std::size_t t = 2; t <= trace.horizon(); ++t) {
    const Belief& prev = series.beliefs.back();
    series.beliefs.push_back(mode == FilterMode::bayes
                                 ? propagate_bayes(prev, t, trace, params)
                                 : propagate_paper(prev, t, trace, params));
  }
  series.mmle = mmle_path(series.beliefs);
  return series;
}

}  // namespace shrinkem
