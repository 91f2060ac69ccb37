#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "kgealign/errors.hpp"
#include "kgealign/metrics.hpp"
#include "kgealign/rng.hpp"

using namespace kgealign;

namespace {

// Synthesizes an alignment/reference pair with the requested overlap.
std::pair<Alignment, ReferenceAlignment> make_counts(std::size_t inter,
                                                     std::size_t alignment_size,
                                                     std::size_t reference_size) {
  REQUIRE(inter <= alignment_size);
  REQUIRE(inter <= reference_size);
  Alignment a;
  ReferenceAlignment ref;
  for (std::size_t i = 0; i < reference_size; ++i)
    ref.add("http://s/#r" + std::to_string(i), "http://t/#r" + std::to_string(i), "=");
  for (std::size_t i = 0; i < inter; ++i)
    a.mappings.push_back(
        {"http://s/#r" + std::to_string(i), "http://t/#r" + std::to_string(i), "=", 1.0});
  for (std::size_t i = 0; i < alignment_size - inter; ++i)
    a.mappings.push_back(
        {"http://s/#w" + std::to_string(i), "http://t/#w" + std::to_string(i), "=", 1.0});
  return {a, ref};
}

struct BenchmarkRow {
  const char* task;
  std::size_t inter, size, ref;
  double precision, recall, f_measure;
};

// Best-model rows, with reference sizes from the dataset statistics table.
constexpr BenchmarkRow kBenchmarkRows[] = {
    {"Mouse-Human", 1047, 1069, 1516, 97.9, 69.0, 81.0},
    {"FISH-ZOOPLANKTON", 9, 9, 15, 100.0, 60.0, 74.9},
    {"ENVO-SWEET", 327, 367, 805, 89.1, 40.6, 55.8},
    {"CEON-BiOnto", 10, 17, 18, 58.8, 55.5, 57.1},
    {"MI-MatOnto", 32, 37, 302, 86.4, 10.5, 18.8},
    {"OMIM-ORDO", 538, 772, 2605, 69.6, 20.6, 31.8},
    {"NCIT-DOID", 1751, 2537, 3280, 69.0, 53.3, 60.2},
};

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("the recorded benchmark rows reproduce within 0.15 points") {
  for (const auto& row : kBenchmarkRows) {
    CAPTURE(row.task);
    const auto [a, ref] = make_counts(row.inter, row.size, row.ref);
    const auto report = evaluate(a, ref, 0.0);
    CHECK(report.intersection == row.inter);
    CHECK(std::fabs(report.precision - row.precision) <= 0.15);
    CHECK(std::fabs(report.recall - row.recall) <= 0.15);
    CHECK(std::fabs(report.f_measure - row.f_measure) <= 0.15);
  }
}

TEST_CASE("perfect alignment scores 100 everywhere") {
  const auto [a, ref] = make_counts(12, 12, 12);
  const auto report = evaluate(a, ref, 1.5);
  CHECK(report.precision == 100.0);
  CHECK(report.recall == 100.0);
  CHECK(report.f_measure == 100.0);
  CHECK(report.seconds == 1.5);
}

TEST_CASE("edge policies") {
  SUBCASE("empty reference is an error") {
    Alignment a;
    ReferenceAlignment ref;
    CHECK_THROWS_AS(evaluate(a, ref, 0.0), Error);
  }
  SUBCASE("empty alignment reports zero precision with a flag") {
    const auto [_, ref] = make_counts(0, 3, 5);
    Alignment empty;
    const auto report = evaluate(empty, ref, 0.0);
    CHECK(report.empty_alignment);
    CHECK(report.precision == 0.0);
    CHECK(report.recall == 0.0);
    CHECK(report.f_measure == 0.0);
  }
  SUBCASE("zero overlap stores F = 0, not NaN") {
    const auto [a, ref] = make_counts(0, 4, 4);
    const auto report = evaluate(a, ref, 0.0);
    CHECK(report.f_measure == 0.0);
    CHECK(std::isfinite(report.f_measure));
  }
  SUBCASE("IRIs are trimmed before matching") {
    ReferenceAlignment ref;
    ref.add("http://s/#a", "http://t/#b", "=");
    Alignment a;
    a.mappings.push_back({" http://s/#a ", "http://t/#b\t", "=", 1.0});
    CHECK(evaluate(a, ref, 0.0).intersection == 1);
  }
}

TEST_CASE("evaluate ignores mapping order") {
  auto [a, ref] = make_counts(5, 9, 7);
  const auto before = evaluate(a, ref, 0.0);
  std::reverse(a.mappings.begin(), a.mappings.end());
  const auto after = evaluate(a, ref, 0.0);
  CHECK(before.precision == after.precision);
  CHECK(before.recall == after.recall);
  CHECK(before.f_measure == after.f_measure);
}

TEST_CASE("harmonic-mean bounds hold on random counts") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t ref_size = 1 + rng.next_index(40);
    const std::size_t size = 1 + rng.next_index(40);
    const std::size_t inter = rng.next_index(std::min(ref_size, size) + 1);
    const auto [a, ref] = make_counts(inter, size, ref_size);
    const auto r = evaluate(a, ref, 0.0);
    CHECK(r.precision >= 0.0);
    CHECK(r.precision <= 100.0);
    CHECK(r.recall >= 0.0);
    CHECK(r.recall <= 100.0);
    CHECK(r.intersection <= std::min(r.alignment_size, r.reference_size));
    if (r.precision > 0.0 && r.recall > 0.0) {
      CHECK(r.f_measure <= std::max(r.precision, r.recall) + 1e-12);
      CHECK(r.f_measure >= std::min(r.precision, r.recall) - 1e-12);
    }
  }
}

TEST_CASE("threshold sweep") {
  Alignment base;
  ReferenceAlignment ref;
  ref.add("http://s/#a", "http://t/#a", "=");
  ref.add("http://s/#b", "http://t/#b", "=");
  base.mappings.push_back({"http://s/#a", "http://t/#a", "=", 0.9});
  base.mappings.push_back({"http://s/#b", "http://t/#x", "=", 0.6});  // wrong
  base.mappings.push_back({"http://s/#c", "http://t/#b", "=", 0.3});  // wrong

  SUBCASE("single-point grid equals a direct evaluation") {
    const auto sweep = sweep_threshold(base, ref, {0.0}, 2.0);
    REQUIRE(sweep.rows.size() == 1);
    const auto direct = evaluate(filter_by_tau(base, 0.0), ref, 2.0);
    CHECK(sweep.rows[0].report.precision == direct.precision);
    CHECK(sweep.rows[0].report.f_measure == direct.f_measure);
  }
  SUBCASE("best row maximizes F; ties break to the lower tau") {
    const auto sweep = sweep_threshold(base, ref, {0.0, 0.5, 0.95}, 0.0);
    REQUIRE(sweep.rows.size() == 3);
    // At 0.5 the wrong 0.3 mapping is gone: P=1/2, R=1/2. At 0.0: P=1/3.
    CHECK(sweep.rows[sweep.best_index].tau == 0.5);
    const auto tie = sweep_threshold(base, ref, {0.4, 0.5}, 0.0);
    CHECK(tie.rows[tie.best_index].tau == 0.4);  // same filtered set, lower tau wins
  }
  SUBCASE("recall and alignment size are non-increasing in tau") {
    const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    const auto sweep = sweep_threshold(base, ref, grid, 0.0);
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
      CHECK(sweep.rows[i].report.recall <= sweep.rows[i - 1].report.recall);
      CHECK(sweep.rows[i].report.alignment_size <= sweep.rows[i - 1].report.alignment_size);
    }
  }
  SUBCASE("grid validation") {
    CHECK_THROWS_AS(sweep_threshold(base, ref, {}, 0.0), Error);
    CHECK_THROWS_AS(sweep_threshold(base, ref, {1.5}, 0.0), Error);
  }
}

TEST_CASE("display rounding is half away from zero") {
  CHECK(round1(2.25) == doctest::Approx(2.3));
  CHECK(round1(-2.25) == doctest::Approx(-2.3));
  CHECK(round1(97.94) == doctest::Approx(97.9));
  CHECK(round1(69.06) == doctest::Approx(69.1));
}

TEST_CASE("report serialization") {
  const auto [a, ref] = make_counts(9, 9, 15);
  const auto report = evaluate(a, ref, 4.0);
  const std::string json = report_to_json(report, "FISH-ZOOPLANKTON", "transf");
  CHECK(json.find("\"task\": \"FISH-ZOOPLANKTON\"") != std::string::npos);
  CHECK(json.find("\"intersection\": 9") != std::string::npos);
  const std::string row = report_table_row(report, "FISH-ZOOPLANKTON", "transf");
  CHECK(row.find("100.0") != std::string::npos);
  CHECK(row.find("75.0") != std::string::npos);
}

TEST_SUITE_END();
