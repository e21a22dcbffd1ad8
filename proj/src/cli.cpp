#include "shrinkem/cli.hpp"

#include <charconv>
#include <iostream>

#include "CLI11.hpp"
#include "shrinkem/batch.hpp"
#include "shrinkem/em.hpp"
#include "shrinkem/filter.hpp"
#include "shrinkem/io.hpp"
#include "shrinkem/oracle.hpp"

namespace shrinkem::cli {
namespace {

struct SimulateArgs {
  SimConfig config;
  std::string trace_out = "trace.csv";
  std::string truth_out = "truth.csv";
};

struct EstimateArgs {
  std::string trace_path;
  Units initial = 0;
  std::string sigma0 = "auto";
  double lambda0 = 0.5;
  double tol = 0.01;
  int max_iters = 100;
  std::string mstep = "robust";
  std::string report_out = "report.json";
  bool with_mmle = false;
  bool verify = false;
};

struct FilterArgs {
  std::string trace_path;
  Units initial = 0;
  double sigma = 0.0;
  double lambda = 0.0;
  std::string mode = "bayes";
  std::string out = "beliefs.csv";
  std::string full_out;
};

void add_sim_flags(CLI::App& cmd, SimulateArgs& args) {
  cmd.add_option("--horizon", args.config.horizon, "Number of periods (>= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{10000000}))
      ->capture_default_str();
  cmd.add_option("--sigma", args.config.sigma_true, "True sale rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--lambda", args.config.lambda_true,
                 "True per-period loss probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd.add_option("--initial", args.config.initial_inventory,
                 "Initial inventory level")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--order-qty", args.config.order_qty,
                 "Units ordered per replenishment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--reorder-point", args.config.reorder_point,
                 "Recorded level at or below which an order is placed")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--seed", args.config.seed, "RNG seed")
      ->capture_default_str();
}

void add_estimate_flags(CLI::App& cmd, EstimateArgs& args) {
  cmd.add_option("--sigma0", args.sigma0,
                 "Starting sale rate, or \"auto\" for the sales mean")
      ->capture_default_str();
  cmd.add_option("--lambda0", args.lambda0, "Starting loss probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd.add_option("--tol", args.tol,
                 "Convergence tolerance on both parameter changes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--max-iters", args.max_iters, "EM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--mstep", args.mstep, "M-step mode: robust or gradient20")
      ->check(CLI::IsMember({"robust", "gradient20"}))
      ->capture_default_str();
}

EMOptions make_em_options(const EstimateArgs& args) {
  EMOptions options;
  if (args.sigma0 != "auto") {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(
        args.sigma0.data(), args.sigma0.data() + args.sigma0.size(), value);
    if (ec != std::errc{} || ptr != args.sigma0.data() + args.sigma0.size() ||
        !(value > 0.0)) {
      throw CLI::ValidationError("--sigma0",
                                 "expected a positive number or \"auto\"");
    }
    options.sigma0 = value;
  }
  options.lambda0 = args.lambda0;
  options.tol_sigma = args.tol;
  options.tol_lambda = args.tol;
  options.max_iters = args.max_iters;
  options.mstep.mode = args.mstep == "gradient20"
                           ? MStepOptions::Mode::gradient20
                           : MStepOptions::Mode::robust;
  return options;
}

EstimateReport make_report(const EMResult& result) {
  return {result.sigma_star, result.lambda_star, result.iterations,
          result.converged,  result.loglik_history, result.trajectory,
          std::nullopt};
}

int cmd_simulate(const SimulateArgs& args) {
  const SimOutcome outcome = simulate(args.config);
  write_trace_csv_file(args.trace_out, outcome.trace());
  write_truth_csv_file(args.truth_out, outcome);
  std::cout << "simulated " << args.config.horizon << " periods (seed "
            << args.config.seed << "): ";
  if (outcome.froze) {
    std::cout << "froze at period " << *outcome.freeze_period << "\n";
  } else {
    std::cout << "no freeze\n";
  }
  return 0;
}

int cmd_estimate(const EstimateArgs& args) {
  const ObservedTrace trace =
      read_trace_csv_file(args.trace_path, args.initial);
  const EMResult result = run_em(trace, make_em_options(args));
  EstimateReport report = make_report(result);
  if (args.with_mmle) {
    report.mmle = run_filter(trace, {result.sigma_star, result.lambda_star})
                      .mmle;
  }
  write_report_json_file(args.report_out, report);
  std::cout << "sigma_star=" << result.sigma_star
            << " lambda_star=" << result.lambda_star
            << " iterations=" << result.iterations
            << " converged=" << (result.converged ? "yes" : "no") << "\n";
  if (args.verify) {
    try {
      const auto [best, score] = brute_force_mle(
          trace, {result.sigma_star, result.lambda_star});
      if (best != result.trajectory) {
        std::cerr << "verify: E-step trajectory differs from exhaustive "
                     "search at the final parameters\n";
        return 2;
      }
      std::cout << "verify: E-step matches exhaustive search ("
                << score << ")\n";
    } catch (const std::runtime_error& e) {
      std::cerr << "verify: skipped (" << e.what() << ")\n";
    }
  }
  return 0;
}

int cmd_filter(const FilterArgs& args) {
  const ObservedTrace trace =
      read_trace_csv_file(args.trace_path, args.initial);
  const FilterMode mode =
      args.mode == "paper" ? FilterMode::paper : FilterMode::bayes;
  const BeliefSeries series =
      run_filter(trace, {args.sigma, args.lambda}, mode);
  write_belief_summary_csv_file(args.out, series);
  if (!args.full_out.empty()) {
    write_belief_long_csv_file(args.full_out, series);
  }
  std::cout << "filtered " << trace.horizon() << " periods (" << args.mode
            << " mode) -> " << args.out << "\n";
  return 0;
}

int cmd_replicate_figure(const SimulateArgs& sim_args,
                         const EstimateArgs& est_args, const std::string& out,
                         const std::string& mode) {
  const SimOutcome outcome = simulate(sim_args.config);
  const ObservedTrace trace = outcome.trace();
  const EMOptions options = make_em_options(est_args);
  const double sigma0 = options.sigma0.value_or(default_init(trace).sigma);
  const EMResult result = run_em(trace, options);
  const BeliefSeries series =
      run_filter(trace, {result.sigma_star, result.lambda_star},
                 mode == "paper" ? FilterMode::paper : FilterMode::bayes);
  write_figure_csv_file(out, outcome, series.mmle);
  std::cout << "sigma0=" << sigma0 << " lambda0=" << options.lambda0
            << " sigma_star=" << result.sigma_star
            << " lambda_star=" << result.lambda_star
            << " iterations=" << result.iterations << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("shrinkem");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Inventory shrinkage estimation from sales and replenishment "
               "histories"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand(
      "simulate", "Simulate a naive (Q,R) system with unrecorded losses");
  add_sim_flags(*sim, sim_args);
  sim->add_option("--trace-out", sim_args.trace_out, "Observable trace CSV")
      ->capture_default_str();
  sim->add_option("--truth-out", sim_args.truth_out, "Ground-truth CSV")
      ->capture_default_str();

  EstimateArgs est_args;
  auto* est = app.add_subcommand(
      "estimate", "Fit the sale rate and loss probability to a trace");
  est->add_option("--trace", est_args.trace_path, "Input trace CSV")
      ->required();
  est->add_option("--initial", est_args.initial,
                  "Initial inventory level of the trace")
      ->check(CLI::NonNegativeNumber)
      ->required();
  add_estimate_flags(*est, est_args);
  est->add_option("--report", est_args.report_out, "Output report JSON")
      ->capture_default_str();
  est->add_flag("--mmle", est_args.with_mmle,
                "Include the filtered MMLE path in the report");
  est->add_flag("--verify", est_args.verify,
                "Cross-check the E-step against exhaustive search "
                "(small traces only)");

  FilterArgs flt_args;
  auto* flt = app.add_subcommand(
      "filter", "Track the inventory belief for known parameters");
  flt->add_option("--trace", flt_args.trace_path, "Input trace CSV")
      ->required();
  flt->add_option("--initial", flt_args.initial, "Initial inventory level")
      ->check(CLI::NonNegativeNumber)
      ->required();
  flt->add_option("--sigma", flt_args.sigma, "Sale rate")
      ->check(CLI::PositiveNumber)
      ->required();
  flt->add_option("--lambda", flt_args.lambda, "Loss probability")
      ->check(CLI::Range(0.0, 1.0))
      ->required();
  flt->add_option("--mode", flt_args.mode, "Recursion: bayes or paper")
      ->check(CLI::IsMember({"bayes", "paper"}))
      ->capture_default_str();
  flt->add_option("--out", flt_args.out, "Per-period summary CSV")
      ->capture_default_str();
  flt->add_option("--full-out", flt_args.full_out,
                  "Optional long-format belief CSV");

  SimulateArgs fig_sim_args;
  EstimateArgs fig_est_args;
  std::string fig_out = "figure.csv";
  std::string fig_mode = "bayes";
  auto* fig = app.add_subcommand(
      "replicate-figure",
      "Simulate, estimate, filter, and export plot-ready series");
  add_sim_flags(*fig, fig_sim_args);
  add_estimate_flags(*fig, fig_est_args);
  fig->add_option("--mode", fig_mode, "Filter recursion: bayes or paper")
      ->check(CLI::IsMember({"bayes", "paper"}))
      ->capture_default_str();
  fig->add_option("--out", fig_out, "Output long-format CSV")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (est->parsed()) return cmd_estimate(est_args);
    if (flt->parsed()) return cmd_filter(flt_args);
    return cmd_replicate_figure(fig_sim_args, fig_est_args, fig_out, fig_mode);
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace shrinkem::cli
