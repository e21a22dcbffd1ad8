#include "shrinkem/batch.hpp"

#include <exception>

namespace shrinkem {
namespace {

// Runs fn(i) for every index, optionally across OpenMP threads. Exceptions
// are captured per element and the first one rethrown after the loop, since
// they must not cross a parallel region.
template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::int64_t count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace

std::vector<SimOutcome> simulate_batch(const SimConfig& base,
                                       const std::vector<std::uint64_t>& seeds,
                                       bool parallel) {
  std::vector<SimOutcome> out(seeds.size());
  for_each_index(seeds.size(), parallel, [&](std::size_t i) {
    SimConfig config = base;
    config.seed = seeds[i];
    out[i] = simulate(config);
  });
  return out;
}

std::vector<EMResult> run_em_batch(const std::vector<ObservedTrace>& traces,
                                   const EMOptions& options, bool parallel) {
  std::vector<EMResult> out(traces.size());
  for_each_index(traces.size(), parallel, [&](std::size_t i) {
    out[i] = run_em(traces[i], options);
  });
  return out;
}

}  // namespace shrinkem
