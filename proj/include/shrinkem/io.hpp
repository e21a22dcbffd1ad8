#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shrinkem/core_model.hpp"
#include "shrinkem/filter.hpp"
#include "shrinkem/simulate.hpp"

namespace shrinkem {

/// Malformed input files. The CLI maps this to exit code 1.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trace files are CSV with header "t,sales,replenishment" and a contiguous
/// 1-based period column. The initial inventory level is not part of the
/// file; it travels as a flag.
ObservedTrace read_trace_csv(std::istream& in, Units initial_inventory,
                             const std::string& name = "trace");
ObservedTrace read_trace_csv_file(const std::string& path,
                                  Units initial_inventory);
void write_trace_csv(std::ostream& out, const ObservedTrace& trace);
void write_trace_csv_file(const std::string& path, const ObservedTrace& trace);

/// Ground-truth CSV: trace columns plus true/recorded levels, the loss, and
/// a 0/1 flag marking periods at or past the freeze point.
void write_truth_csv(std::ostream& out, const SimOutcome& outcome);
void write_truth_csv_file(const std::string& path, const SimOutcome& outcome);

/// Estimation result document. Serialized as JSON with every number printed
/// at 17 significant digits so a read-back reproduces the doubles exactly.
struct EstimateReport {
  double sigma_star = 0.0;
  double lambda_star = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loglik_history;
  Trajectory trajectory;
  std::optional<Trajectory> mmle;
};

void write_report_json(std::ostream& out, const EstimateReport& report);
void write_report_json_file(const std::string& path,
                            const EstimateReport& report);
EstimateReport read_report_json(std::istream& in);
EstimateReport read_report_json_file(const std::string& path);

/// Per-period belief summary: "t,mmle,support_lo,support_hi".
void write_belief_summary_csv(std::ostream& out, const BeliefSeries& series);
void write_belief_summary_csv_file(const std::string& path,
                                   const BeliefSeries& series);

/// Full belief mass in long format: "t,level,probability".
void write_belief_long_csv(std::ostream& out, const BeliefSeries& series);
void write_belief_long_csv_file(const std::string& path,
                                const BeliefSeries& series);

/// Plot-ready long format, "t,series,value", with the four series
/// sales, naive_inventory, mmle_inventory and true_inventory.
void write_figure_csv(std::ostream& out, const SimOutcome& outcome,
                      const Trajectory& mmle);
void write_figure_csv_file(const std::string& path, const SimOutcome& outcome,
                           const Trajectory& mmle);

}  // namespace shrinkem
