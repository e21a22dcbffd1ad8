#include "shrinkem/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace shrinkem {
namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

Units parse_units(std::string_view field, const std::string& name,
                  std::size_t line) {
  Units value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(name + " line " + std::to_string(line) +
                     ": expected an integer, got \"" + std::string(field) +
                     "\"");
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

ObservedTrace read_trace_csv(std::istream& in, Units initial_inventory,
                             const std::string& name) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "t,sales,replenishment") {
    throw ParseError(name + " line 1: expected header t,sales,replenishment");
  }
  ObservedTrace trace;
  trace.initial_inventory = initial_inventory;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = strip_cr(line);
    if (body.empty()) continue;
    const auto fields = split_csv(body);
    if (fields.size() != 3) {
      throw ParseError(name + " line " + std::to_string(line_no) +
                       ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    const Units t = parse_units(fields[0], name, line_no);
    if (t != static_cast<Units>(trace.sales.size()) + 1) {
      throw ParseError(name + " line " + std::to_string(line_no) +
                       ": period column must count 1,2,... contiguously");
    }
    trace.sales.push_back(parse_units(fields[1], name, line_no));
    trace.replenishments.push_back(parse_units(fields[2], name, line_no));
  }
  if (trace.sales.empty()) {
    throw ParseError(name + ": no data rows");
  }
  return trace;
}

ObservedTrace read_trace_csv_file(const std::string& path,
                                  Units initial_inventory) {
  auto in = open_in(path);
  return read_trace_csv(in, initial_inventory, path);
}

void write_trace_csv(std::ostream& out, const ObservedTrace& trace) {
  out << "t,sales,replenishment\n";
  for (std::size_t t = 1; t <= trace.horizon(); ++t) {
    out << t << ',' << trace.sales[t - 1] << ',' << trace.replenishments[t - 1]
        << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const ObservedTrace& trace) {
  auto out = open_out(path);
  write_trace_csv(out, trace);
}

void write_truth_csv(std::ostream& out, const SimOutcome& outcome) {
  out << "t,sales,replenishment,true_inventory,recorded_inventory,loss,froze\n";
  for (std::size_t t = 1; t <= outcome.sales.size(); ++t) {
    const bool frozen = outcome.freeze_period && t >= *outcome.freeze_period;
    out << t << ',' << outcome.sales[t - 1] << ','
        << outcome.replenishments[t - 1] << ',' << outcome.true_inventory[t - 1]
        << ',' << outcome.recorded_inventory[t - 1] << ','
        << outcome.losses[t - 1] << ',' << (frozen ? 1 : 0) << '\n';
  }
}

void write_truth_csv_file(const std::string& path, const SimOutcome& outcome) {
  auto out = open_out(path);
  write_truth_csv(out, outcome);
}

void write_report_json(std::ostream& out, const EstimateReport& report) {
  out << "{\n";
  out << "  \"sigma_star\": " << fmt17(report.sigma_star) << ",\n";
  out << "  \"lambda_star\": " << fmt17(report.lambda_star) << ",\n";
  out << "  \"iterations\": " << report.iterations << ",\n";
  out << "  \"converged\": " << (report.converged ? "true" : "false") << ",\n";
  out << "  \"loglik_history\": [";
  for (std::size_t i = 0; i < report.loglik_history.size(); ++i) {
    out << (i == 0 ? "" : ", ") << fmt17(report.loglik_history[i]);
  }
  out << "],\n";
  out << "  \"trajectory\": [";
  for (std::size_t i = 0; i < report.trajectory.size(); ++i) {
    out << (i == 0 ? "" : ", ") << report.trajectory[i];
  }
  out << "]";
  if (report.mmle) {
    out << ",\n  \"mmle\": [";
    for (std::size_t i = 0; i < report.mmle->size(); ++i) {
      out << (i == 0 ? "" : ", ") << (*report.mmle)[i];
    }
    out << "]";
  }
  out << "\n}\n";
}

void write_report_json_file(const std::string& path,
                            const EstimateReport& report) {
  auto out = open_out(path);
  write_report_json(out, report);
}

EstimateReport read_report_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report JSON: ") + e.what());
  }
  try {
    std::optional<Trajectory> mmle;
    if (doc.contains("mmle")) mmle = doc.at("mmle").get<Trajectory>();
    return EstimateReport{doc.at("sigma_star").get<double>(),
                          doc.at("lambda_star").get<double>(),
                          doc.at("iterations").get<int>(),
                          doc.at("converged").get<bool>(),
                          doc.at("loglik_history").get<std::vector<double>>(),
                          doc.at("trajectory").get<Trajectory>(),
                          std::move(mmle)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad report JSON: ") + e.what());
  }
}

EstimateReport read_report_json_file(const std::string& path) {
  auto in = open_in(path);
  return read_report_json(in);
}

void write_belief_summary_csv(std::ostream& out, const BeliefSeries& series) {
  out << "t,mmle,support_lo,support_hi\n";
  for (std::size_t i = 0; i < series.beliefs.size(); ++i) {
    const Belief& b = series.beliefs[i];
    out << b.period << ',' << series.mmle[i] << ',' << b.lo << ',' << b.hi()
        << '\n';
  }
}

void write_belief_summary_csv_file(const std::string& path,
                                   const BeliefSeries& series) {
  auto out = open_out(path);
  write_belief_summary_csv(out, series);
}

void write_belief_long_csv(std::ostream& out, const BeliefSeries& series) {
  out << "t,level,probability\n";
  for (const Belief& b : series.beliefs) {
    for (Units level = b.lo; level <= b.hi(); ++level) {
      out << b.period << ',' << level << ',' << fmt17(b.prob_at(level)) << '\n';
    }
  }
}

void write_belief_long_csv_file(const std::string& path,
                                const BeliefSeries& series) {
  auto out = open_out(path);
  write_belief_long_csv(out, series);
}

void write_figure_csv(std::ostream& out, const SimOutcome& outcome,
                      const Trajectory& mmle) {
  if (mmle.size() != outcome.sales.size()) {
    throw std::invalid_argument("mmle length does not match outcome");
  }
  out << "t,series,value\n";
  for (std::size_t t = 1; t <= outcome.sales.size(); ++t) {
    out << t << ",sales," << outcome.sales[t - 1] << '\n';
    out << t << ",naive_inventory," << outcome.recorded_inventory[t - 1]
        << '\n';
    out << t << ",mmle_inventory," << mmle[t - 1] << '\n';
    out << t << ",true_inventory," << outcome.true_inventory[t - 1] << '\n';
  }
}

void write_figure_csv_file(const std::string& path, const SimOutcome& outcome,
                           const Trajectory& mmle) {
  auto out = open_out(path);
  write_figure_csv(out, outcome, mmle);
}

}  // namespace shrinkem
