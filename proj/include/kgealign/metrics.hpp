#pragma once

#include <string>
#include <vector>

#include "kgealign/alignment.hpp"

namespace kgealign {

// Precision/recall/F-measure as percentages, full precision; rounding to
// one decimal happens only at display time.
struct EvaluationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t intersection = 0;
  std::size_t alignment_size = 0;
  std::size_t reference_size = 0;
  double tau = 0.0;
  double seconds = 0.0;
  bool empty_alignment = false;  // precision reported as 0 by policy
};

// Intersects (source IRI, target IRI) pairs exactly (after trimming),
// ignoring relation and confidence.
EvaluationReport evaluate(const Alignment& alignment, const ReferenceAlignment& reference,
                          double seconds);

struct SweepRow {
  double tau = 0.0;
  EvaluationReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t best_index = 0;  // max F, ties to the lower tau
};

// Re-thresholds a base alignment (computed at tau = -1, i.e. all greedy
// winners) across the grid. Greedy acceptance is threshold-independent, so
// this equals running match() per grid point, without retraining.
SweepResult sweep_threshold(const Alignment& base, const ReferenceAlignment& reference,
                            const std::vector<double>& grid, double seconds);

Alignment filter_by_tau(const Alignment& base, double tau);

// Display rounding: one decimal, half away from zero.
double round1(double value);

std::string report_to_json(const EvaluationReport& report, const std::string& task,
                           const std::string& model);
// Text row mirroring: Task | KGE | tau | cap | A | T | Prec | Rec | F
std::string report_table_header();
std::string report_table_row(const EvaluationReport& report, const std::string& task,
                             const std::string& model);

}  // namespace kgealign
