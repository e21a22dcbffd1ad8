#include "shrinkem/mstep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace shrinkem {
namespace {

constexpr int kGridPoints = 64;
constexpr int kGradientIters = 20;

void check_lengths(const Trajectory& trajectory, const ObservedTrace& trace) {
  if (trajectory.size() != trace.horizon()) {
    throw std::invalid_argument("trajectory length does not match trace");
  }
}

double default_sigma_hi(const ObservedTrace& trace) {
  Units max_sales = 0;
  for (const Units s : trace.sales) max_sales = std::max(max_sales, s);
  return 2.0 * static_cast<double>(max_sales + 1);
}

// True if at least one period's sale term actually depends on sigma.
bool sigma_informative(const Trajectory& trajectory,
                       const ObservedTrace& trace) {
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    if (prev >= 1) return true;  // uncensored or censored-at-positive-stock
    prev = trajectory[t];
  }
  return false;
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Up to 20 ascent steps with a halving line search; never moves downhill.
double ascend(const std::function<double(double)>& f,
              const std::function<double(double)>& grad, double x, double lo,
              double hi) {
  x = std::clamp(x, lo, hi);
  double cur = f(x);
  for (int it = 0; it < kGradientIters; ++it) {
    const double g = grad(x);
    if (g == 0.0) break;
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-12) {
      const double cand = std::clamp(x + step * g, lo, hi);
      const double fc = f(cand);
      if (fc > cur) {
        x = cand;
        cur = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return x;
}

}  // namespace

void MStepOptions::validate() const {
  if (!(sigma_lo > 0.0)) throw std::domain_error("sigma_lo must be > 0");
  if (sigma_hi > 0.0 && !(sigma_hi > sigma_lo)) {
    throw std::domain_error("sigma bracket must satisfy lo < hi");
  }
  if (!(tolerance > 0.0)) throw std::domain_error("tolerance must be > 0");
  if (!(lambda_clamp > 0.0 && lambda_clamp < 0.5)) {
    throw std::domain_error("lambda_clamp must lie in (0, 0.5)");
  }
}

LogLik sales_loglik(double sigma, const Trajectory& trajectory,
                    const ObservedTrace& trace) {
  check_lengths(trajectory, trace);
  LogLik total = 0.0;
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    total += trunc_poisson_logpmf(trace.sales[t], prev, sigma);
    prev = trajectory[t];
  }
  return total;
}

LogLik loss_loglik(double lambda, const Trajectory& trajectory,
                   const ObservedTrace& trace) {
  check_lengths(trajectory, trace);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("lambda must lie in [0, 1]");
  }
  LogLik total = 0.0;
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    total += transition_logprob(prev, trace.sales[t], trace.replenishments[t],
                                trajectory[t], lambda);
    if (total == kLogZero) return kLogZero;
    prev = trajectory[t];
  }
  return total;
}

LossCounts loss_counts(const Trajectory& trajectory,
                       const ObservedTrace& trace) {
  check_lengths(trajectory, trace);
  LossCounts counts;
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Units s = trace.sales[t];
    if (s > prev) throw InfeasibleError("trajectory infeasible for trace");
    const Units headroom = prev - s;
    const Units loss = headroom + trace.replenishments[t] - trajectory[t];
    if (loss < 0 || loss > 1 || loss > headroom) {
      throw InfeasibleError("trajectory infeasible for trace");
    }
    if (headroom >= 1) {
      if (loss == 1) {
        ++counts.losses;
      } else {
        ++counts.keeps;
      }
    }
    prev = trajectory[t];
  }
  return counts;
}

double sigma_gradient(double sigma, const Trajectory& trajectory,
                      const ObservedTrace& trace) {
  check_lengths(trajectory, trace);
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be > 0");
  double grad = 0.0;
  Units prev = trace.initial_inventory;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Units s = trace.sales[t];
    if (s > prev) throw InfeasibleError("trajectory infeasible for trace");
    if (s < prev) {
      grad += -1.0 + static_cast<double>(s) / sigma;
    } else if (prev >= 1) {
      // d/dsigma log P(X >= i) = pmf(i - 1) / P(X >= i)
      grad += std::exp(trunc_poisson_logpmf(prev - 1, prev, sigma) -
                       trunc_poisson_logpmf(prev, prev, sigma));
    }
    prev = trajectory[t];
  }
  return grad;
}

ScalarEstimate maximize_sigma(const Trajectory& trajectory,
                              const ObservedTrace& trace, double sigma_in,
                              const MStepOptions& options) {
  options.validate();
  check_lengths(trajectory, trace);
  if (!(sigma_in > 0.0)) throw std::domain_error("sigma must be > 0");
  if (!sigma_informative(trajectory, trace)) return {sigma_in, true};

  const double lo = options.sigma_lo;
  const double hi =
      options.sigma_hi > 0.0 ? options.sigma_hi : default_sigma_hi(trace);
  const auto f = [&](double s) { return sales_loglik(s, trajectory, trace); };

  if (options.mode == MStepOptions::Mode::gradient20) {
    const auto g = [&](double s) {
      return sigma_gradient(s, trajectory, trace);
    };
    double out = ascend(f, g, sigma_in, lo, hi);
    if (f(out) < f(sigma_in)) out = sigma_in;
    const bool boundary =
        out <= lo + options.tolerance || out >= hi - options.tolerance;
    return {out, boundary};
  }

  // Coarse log-spaced scan, then golden-section refinement around the best
  // bracket. The grid guards against non-concave censored tails.
  std::array<double, kGridPoints> grid{};
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int j = 0; j < kGridPoints; ++j) {
    grid[j] = std::exp(log_lo + (log_hi - log_lo) * j / (kGridPoints - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  int best_j = 0;
  double best_f = f(grid[0]);
  for (int j = 1; j < kGridPoints; ++j) {
    const double fj = f(grid[j]);
    if (fj > best_f) {
      best_f = fj;
      best_j = j;
    }
  }
  const double a = grid[std::max(0, best_j - 1)];
  const double b = grid[std::min(kGridPoints - 1, best_j + 1)];
  double out = golden_max(f, a, b, options.tolerance);
  bool boundary = false;
  if (out - lo <= options.tolerance) {
    boundary = true;
    if (f(lo) >= f(out)) out = lo;
  } else if (hi - out <= options.tolerance) {
    boundary = true;
    if (f(hi) >= f(out)) out = hi;
  }
  if (f(out) < f(sigma_in)) return {sigma_in, false};
  return {out, boundary};
}

ScalarEstimate maximize_lambda(const Trajectory& trajectory,
                               const ObservedTrace& trace, double lambda_in,
                               const MStepOptions& options) {
  options.validate();
  const LossCounts counts = loss_counts(trajectory, trace);
  const std::int64_t informative = counts.losses + counts.keeps;
  if (informative == 0) return {lambda_in, true};

  const double eps = options.lambda_clamp;
  if (options.mode == MStepOptions::Mode::gradient20) {
    const auto f = [&](double l) { return loss_loglik(l, trajectory, trace); };
    const auto g = [&](double l) {
      return static_cast<double>(counts.losses) / l -
             static_cast<double>(counts.keeps) / (1.0 - l);
    };
    const double out = ascend(f, g, lambda_in, eps, 1.0 - eps);
    return {out, out <= eps || out >= 1.0 - eps};
  }

  const double raw = static_cast<double>(counts.losses) /
                     static_cast<double>(informative);
  const double clamped = std::clamp(raw, eps, 1.0 - eps);
  return {clamped, clamped != raw};
}

}  // namespace shrinkem
