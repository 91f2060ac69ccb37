#include "kgealign/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

double round1(double value) {
  return std::round(value * 10.0) / 10.0;
}

EvaluationReport evaluate(const Alignment& alignment, const ReferenceAlignment& reference,
                          double seconds) {
  if (reference.size() == 0) throw invalid_error("reference alignment is empty");

  EvaluationReport report;
  report.alignment_size = alignment.size();
  report.reference_size = reference.size();
  report.tau = alignment.tau;
  report.seconds = seconds;

  std::size_t hits = 0;
  for (const auto& m : alignment.mappings)
    if (reference.contains(trim(m.source_iri), trim(m.target_iri))) ++hits;
  report.intersection = hits;

  if (report.alignment_size > 0) {
    report.precision = 100.0 * static_cast<double>(hits) /
                       static_cast<double>(report.alignment_size);
  } else {
    report.precision = 0.0;  // undefined; reported as 0 with a warning upstream
    report.empty_alignment = true;
  }
  report.recall =
      100.0 * static_cast<double>(hits) / static_cast<double>(report.reference_size);
  const double pr = report.precision + report.recall;
  report.f_measure = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  return report;
}

Alignment filter_by_tau(const Alignment& base, double tau) {
  Alignment out;
  out.tau = tau;
  out.model = base.model;
  for (const auto& m : base.mappings)
    if (m.confidence >= tau) out.mappings.push_back(m);
  return out;
}

SweepResult sweep_threshold(const Alignment& base, const ReferenceAlignment& reference,
                            const std::vector<double>& grid, double seconds) {
  if (grid.empty()) throw invalid_error("sweep grid is empty");
  for (double tau : grid)
    if (tau < 0.0 || tau > 1.0) throw invalid_error("sweep grid values must lie in [0, 1]");

  SweepResult result;
  result.rows.reserve(grid.size());
  for (double tau : grid) {
    SweepRow row;
    row.tau = tau;
    row.report = evaluate(filter_by_tau(base, tau), reference, seconds);
    result.rows.push_back(std::move(row));
  }
  result.best_index = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    const double f = result.rows[i].report.f_measure;
    const double best_f = result.rows[result.best_index].report.f_measure;
    if (f > best_f ||
        (f == best_f && result.rows[i].tau < result.rows[result.best_index].tau))
      result.best_index = i;
  }
  return result;
}

std::string report_to_json(const EvaluationReport& report, const std::string& task,
                           const std::string& model) {
  nlohmann::json j{{"task", task},
                   {"model", model},
                   {"tau", report.tau},
                   {"intersection", report.intersection},
                   {"alignment_size", report.alignment_size},
                   {"reference_size", report.reference_size},
                   {"seconds", report.seconds},
                   {"precision", report.precision},
                   {"recall", report.recall},
                   {"f_measure", report.f_measure},
                   {"empty_alignment", report.empty_alignment}};
  return j.dump(2) + "\n";
}

std::string report_table_header() {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-20s %-10s %6s %6s %6s %8s %7s %7s %7s", "Task", "KGE",
                "tau", "cap", "A", "T", "Prec", "Rec", "F");
  return buf;
}

std::string report_table_row(const EvaluationReport& report, const std::string& task,
                             const std::string& model) {
  char buf[240];
  std::snprintf(buf, sizeof(buf), "%-20s %-10s %6.2f %6zu %6zu %8.1f %7.1f %7.1f %7.1f",
                task.c_str(), model.c_str(), report.tau, report.intersection,
                report.alignment_size, report.seconds, round1(report.precision),
                round1(report.recall), round1(report.f_measure));
  return buf;
}

}  // namespace kgealign
