// Compares the serial reference implementations against the hoisted and
// OpenMP-parallel kernels: the trellis backward pass on one wide instance,
// and a many-seed simulate+estimate sweep. Results are checked for equality
// before any timing is reported.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "shrinkem/batch.hpp"
#include "shrinkem/em.hpp"
#include "shrinkem/estep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using shrinkem::DpExec;
using shrinkem::DpTables;
using shrinkem::ObservedTrace;
using shrinkem::Params;
using shrinkem::Units;

double now_seconds() {
  const auto t = std::chrono::steady_clock::now().time_since_epoch();
  return std::chrono::duration<double>(t).count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

// Deterministic wide-trellis instance: sales are matched by replenishments
// so every period keeps a row of about `base` cells.
ObservedTrace wide_instance(Units base, std::size_t periods) {
  ObservedTrace trace;
  trace.initial_inventory = base;
  trace.sales.reserve(periods);
  trace.replenishments.reserve(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    const Units s = base / 16 + static_cast<Units>((t * 7919) % 997);
    trace.sales.push_back(s);
    trace.replenishments.push_back(s);
  }
  return trace;
}

bool tables_equal(const DpTables& a, const DpTables& b) {
  return a.upper_bounds == b.upper_bounds && a.value == b.value &&
         a.policy == b.policy;
}

void bench_trellis() {
  const ObservedTrace trace = wide_instance(150000, 32);
  const Params params{static_cast<double>(trace.sales[0]), 0.25};

  const DpTables ref = shrinkem::backward_pass_reference(trace, params);
  const DpTables hoisted = shrinkem::backward_pass(trace, params);
  const DpTables parallel =
      shrinkem::backward_pass(trace, params, DpExec::parallel);
  if (!tables_equal(ref, hoisted) || !tables_equal(ref, parallel)) {
    std::printf("trellis: KERNEL MISMATCH\n");
    std::exit(1);
  }

  const double t_ref = time_best_of(3, [&] {
    shrinkem::backward_pass_reference(trace, params);
  });
  const double t_hoisted =
      time_best_of(3, [&] { shrinkem::backward_pass(trace, params); });
  const double t_par = time_best_of(3, [&] {
    shrinkem::backward_pass(trace, params, DpExec::parallel);
  });

  std::printf("trellis backward pass (%lld cells)\n",
              static_cast<long long>(ref.cells));
  std::printf("  reference serial   %8.2f ms\n", t_ref * 1e3);
  std::printf("  hoisted serial     %8.2f ms  (%.2fx vs reference)\n",
              t_hoisted * 1e3, t_ref / t_hoisted);
  std::printf("  hoisted parallel   %8.2f ms  (%.2fx vs hoisted serial)\n",
              t_par * 1e3, t_hoisted / t_par);
}

void bench_sweep(std::size_t n_seeds) {
  shrinkem::SimConfig base;  // defaults: the classic freeze-prone setup
  std::vector<std::uint64_t> seeds(n_seeds);
  std::iota(seeds.begin(), seeds.end(), 1);

  const auto outcomes_serial = shrinkem::simulate_batch(base, seeds, false);
  const auto outcomes_parallel = shrinkem::simulate_batch(base, seeds, true);
  std::vector<ObservedTrace> traces;
  traces.reserve(n_seeds);
  for (const auto& o : outcomes_serial) traces.push_back(o.trace());

  const shrinkem::EMOptions options;
  const auto fits_serial = shrinkem::run_em_batch(traces, options, false);
  const auto fits_parallel = shrinkem::run_em_batch(traces, options, true);
  for (std::size_t i = 0; i < n_seeds; ++i) {
    if (outcomes_serial[i].sales != outcomes_parallel[i].sales ||
        fits_serial[i].sigma_star != fits_parallel[i].sigma_star ||
        fits_serial[i].lambda_star != fits_parallel[i].lambda_star ||
        fits_serial[i].trajectory != fits_parallel[i].trajectory) {
      std::printf("sweep: BATCH MISMATCH at seed %llu\n",
                  static_cast<unsigned long long>(seeds[i]));
      std::exit(1);
    }
  }

  const double t_serial = time_best_of(2, [&] {
    shrinkem::run_em_batch(traces, options, false);
  });
  const double t_parallel = time_best_of(2, [&] {
    shrinkem::run_em_batch(traces, options, true);
  });

  std::printf("estimate sweep (%zu simulated traces)\n", n_seeds);
  std::printf("  serial             %8.2f ms\n", t_serial * 1e3);
  std::printf("  parallel           %8.2f ms  (%.2fx)\n", t_parallel * 1e3,
              t_serial / t_parallel);
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_seeds = 512;
  if (argc > 1) n_seeds = std::stoul(argv[1]);
#ifdef _OPENMP
  std::printf("OpenMP with %d threads\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n");
#endif
  bench_trellis();
  bench_sweep(n_seeds);
  return 0;
}
