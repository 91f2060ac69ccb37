#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "kgealign/align.hpp"
#include "kgealign/errors.hpp"
#include "match_oracle.hpp"

using namespace kgealign;
using kgealign::testing::TempDir;
using kgealign::testing::make_document;
using kgealign::testing::make_sides;
using kgealign::testing::matrix_of;
using kgealign::testing::oracle_accept;
using kgealign::testing::write_file;

namespace {

std::set<std::pair<std::string, std::string>> pair_set(const Alignment& a) {
  std::set<std::pair<std::string, std::string>> s;
  for (const auto& m : a.mappings) s.insert({m.source_iri, m.target_iri});
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("align");

TEST_CASE("extract_side normalizes rows") {
  const auto f = build_factory(
      make_document(Side::source, {{"a", "p", "b"}}, "http://src/#"),
      make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
  Rng rng(1);
  auto params = init_params(ModelKind::distmult, 2, 1, 2, rng);
  const EntityId a = f.vocabulary.entity_to_id.at("a");
  params.tensors[0].row(a)[0] = 3.0;
  params.tensors[0].row(a)[1] = 4.0;

  const auto side = extract_side(params, f, Side::source, false);
  const auto it = std::find(side.entity_ids.begin(), side.entity_ids.end(), a);
  REQUIRE(it != side.entity_ids.end());
  const auto row = side.row(static_cast<std::size_t>(it - side.entity_ids.begin()));
  CHECK(row[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(row[1] == doctest::Approx(0.8).epsilon(1e-12));
  for (std::size_t i = 0; i < side.rows(); ++i) {
    double norm_sq = 0.0;
    for (double v : side.row(i)) norm_sq += v * v;
    CHECK(std::fabs(std::sqrt(norm_sq) - 1.0) < 1e-9);
  }
}

TEST_CASE("shared entities extract to identical rows on both sides") {
  const auto f = build_factory(
      make_document(Side::source, {{"a", "p", "b"}}, "http://src/#"),
      make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
  Rng rng(2);
  const auto params = init_params(ModelKind::transe, 2, 1, 4, rng);
  const auto src = extract_side(params, f, Side::source, false);
  const auto tgt = extract_side(params, f, Side::target, false);
  REQUIRE(src.entity_ids == tgt.entity_ids);
  CHECK(src.matrix == tgt.matrix);
}

TEST_CASE("class_only filters to the side's class entities") {
  auto src_doc = make_document(Side::source, {{"a", "p", "b"}}, "http://src/#");
  src_doc.class_entities.insert("http://src/#a");
  const auto f = build_factory(src_doc,
                               make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
  Rng rng(3);
  const auto params = init_params(ModelKind::transe, 2, 1, 4, rng);
  const auto side = extract_side(params, f, Side::source, true);
  REQUIRE(side.entity_ids.size() == 1);
  CHECK(side.entity_ids[0] == f.vocabulary.entity_to_id.at("a"));
  // target side has no class entities at all
  CHECK_THROWS_AS(extract_side(params, f, Side::target, true), Error);
}

TEST_CASE("zero-norm rows are rejected by name") {
  const auto f = build_factory(
      make_document(Side::source, {{"a", "p", "b"}}, "http://src/#"),
      make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
  Rng rng(4);
  auto params = init_params(ModelKind::distmult, 2, 1, 2, rng);
  const EntityId a = f.vocabulary.entity_to_id.at("a");
  params.tensors[0].row(a)[0] = 0.0;
  params.tensors[0].row(a)[1] = 0.0;
  CHECK_THROWS_WITH_AS(extract_side(params, f, Side::source, false),
                       doctest::Contains("'a'"), Error);
}

TEST_CASE("similarity hand values") {
  SideEmbeddings a, b;
  a.dim = b.dim = 2;
  a.entity_ids = {0, 1};
  a.matrix = {1.0, 0.0, 0.6, 0.8};
  b.entity_ids = {2, 3};
  b.matrix = {0.0, 1.0, 0.8, 0.6};
  const auto S = similarity(a, b, 1);
  CHECK(S.at(0, 0) == 0.0);                        // orthogonal
  CHECK(S.at(1, 1) == doctest::Approx(0.96));      // (0.6,0.8).(0.8,0.6)
  const auto self = similarity(a, a, 128);
  CHECK(self.at(0, 0) == doctest::Approx(1.0));    // identical unit rows
  CHECK(self.at(1, 1) == doctest::Approx(1.0));

  SideEmbeddings c;
  c.dim = 3;
  c.entity_ids = {4};
  c.matrix = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(similarity(a, c, 8), Error);

  // block size cannot change the result
  SideEmbeddings wide;
  wide.dim = 2;
  Rng rng(5);
  for (int i = 0; i < 37; ++i) {
    wide.entity_ids.push_back(static_cast<EntityId>(i));
    const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
    const double n = std::sqrt(x * x + y * y);
    wide.matrix.push_back(x / n);
    wide.matrix.push_back(y / n);
  }
  const auto s1 = similarity(wide, wide, 1);
  const auto s2 = similarity(wide, wide, 1000);
  CHECK(s1.values == s2.values);
}

TEST_CASE("match follows the spec hand traces") {
  SUBCASE("greedy drops the conflicting second-best source") {
    const auto fx = make_sides(2, 2);
    const auto S = matrix_of(2, 2, {1.0, 0.2, 0.9, 0.3});
    const auto a = match(S, fx.source, fx.target, fx.catalog, 0.5);
    REQUIRE(a.size() == 1);
    CHECK(a.mappings[0].source_iri == "http://s/#e0");
    CHECK(a.mappings[0].target_iri == "http://t/#e0");
    CHECK(a.mappings[0].confidence == 1.0);
  }
  SUBCASE("diagonal dominance keeps both") {
    const auto fx = make_sides(2, 2);
    const auto S = matrix_of(2, 2, {1.0, 0.0, 0.0, 1.0});
    const auto a = match(S, fx.source, fx.target, fx.catalog, 0.5);
    CHECK(pair_set(a) == std::set<std::pair<std::string, std::string>>{
                             {"http://s/#e0", "http://t/#e0"},
                             {"http://s/#e1", "http://t/#e1"}});
  }
  SUBCASE("threshold above every entry empties the alignment") {
    const auto fx = make_sides(3, 3);
    SimilarityMatrix S = matrix_of(3, 3, std::vector<double>(9, 0.4));
    const auto a = match(S, fx.source, fx.target, fx.catalog, 1.0);
    CHECK(a.size() == 0);
  }
  SUBCASE("argmax ties break to the lower target index") {
    const auto fx = make_sides(1, 3);
    const auto S = matrix_of(1, 3, {0.7, 0.7, 0.7});
    const auto a = match(S, fx.source, fx.target, fx.catalog, 0.0);
    REQUIRE(a.size() == 1);
    CHECK(a.mappings[0].target_iri == "http://t/#e0");
  }
  SUBCASE("equal-confidence candidates accept the lower source index first") {
    const auto fx = make_sides(2, 1);
    const auto S = matrix_of(2, 1, {0.8, 0.8});
    const auto a = match(S, fx.source, fx.target, fx.catalog, 0.0);
    REQUIRE(a.size() == 1);
    CHECK(a.mappings[0].source_iri == "http://s/#e0");
  }
}

TEST_CASE("greedy equals the repeated-scan oracle on random matrices") {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.next_index(5);
    const std::size_t m = 1 + rng.next_index(5);
    std::vector<double> values(n * m);
    for (auto& v : values) v = rng.uniform(-1.0, 1.0);  // distinct w.p. 1
    const auto S = matrix_of(n, m, values);
    const auto fx = make_sides(n, m);
    const auto a = match(S, fx.source, fx.target, fx.catalog, -1.0);
    const auto expected = oracle_accept(S);
    REQUIRE(a.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
      CHECK(a.mappings[k].source_iri ==
            "http://s/#e" + std::to_string(expected[k].first));
      CHECK(a.mappings[k].target_iri ==
            "http://t/#e" + std::to_string(expected[k].second));
    }
  }
}

TEST_CASE("one-to-one and tau monotonicity on random instances") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.next_index(8);
    const std::size_t m = 1 + rng.next_index(8);
    std::vector<double> values(n * m);
    for (auto& v : values) v = rng.uniform(-1.0, 1.0);
    const auto S = matrix_of(n, m, values);
    const auto fx = make_sides(n, m);
    const double tau1 = rng.uniform(-1.0, 1.0);
    const double tau2 = std::min(1.0, tau1 + rng.uniform(0.0, 0.5));

    const auto a1 = match(S, fx.source, fx.target, fx.catalog, tau1);
    const auto a2 = match(S, fx.source, fx.target, fx.catalog, tau2);

    std::set<std::string> sources, targets;
    for (const auto& mp : a1.mappings) {
      CHECK(sources.insert(mp.source_iri).second);
      CHECK(targets.insert(mp.target_iri).second);
      CHECK(mp.confidence >= tau1);
      CHECK(mp.confidence <= 1.0 + 1e-9);
    }
    const auto set1 = pair_set(a1);
    for (const auto& p : pair_set(a2)) CHECK(set1.count(p) == 1);
  }
}

TEST_CASE("argmax is invariant under positive row scaling") {
  const auto f = build_factory(
      make_document(Side::source, {{"a", "p", "b"}, {"b", "p", "c"}}, "http://src/#"),
      make_document(Side::target, {{"x", "p", "y"}, {"y", "p", "a"}}, "http://tgt/#"));
  Rng rng(8);
  auto params = init_params(ModelKind::distmult, f.vocabulary.num_entities(), 1, 8, rng);
  auto scaled = params;
  Rng scale_rng(9);
  for (std::size_t i = 0; i < scaled.tensors[0].rows; ++i) {
    const double c = scale_rng.uniform(0.1, 10.0);
    for (auto& v : scaled.tensors[0].row(i)) v *= c;
  }
  const auto s1 = similarity(extract_side(params, f, Side::source, false),
                             extract_side(params, f, Side::target, false));
  const auto s2 = similarity(extract_side(scaled, f, Side::source, false),
                             extract_side(scaled, f, Side::target, false));
  REQUIRE(s1.values.size() == s2.values.size());
  for (std::size_t i = 0; i < s1.values.size(); ++i)
    CHECK(s1.values[i] == doctest::Approx(s2.values[i]).epsilon(1e-12));

  const auto a1 = match(s1, extract_side(params, f, Side::source, false),
                        extract_side(params, f, Side::target, false), f.catalog, 0.0);
  const auto a2 = match(s2, extract_side(scaled, f, Side::source, false),
                        extract_side(scaled, f, Side::target, false), f.catalog, 0.0);
  CHECK(pair_set(a1) == pair_set(a2));
}

TEST_CASE("pipeline aligns fully shared labels at theta = 1") {
  TempDir dir("pipe");
  write_file(dir.file("s.nt"),
             "<http://s/#A> <http://v/#rel> <http://s/#B> .\n");
  write_file(dir.file("t.nt"),
             "<http://t/#A> <http://v/#rel> <http://t/#B> .\n");
  TrainingConfig c;
  c.model = ModelKind::transe;
  c.dim = 8;
  c.epochs = 2;
  c.batch_size = 4;
  c.seed = 7;
  const auto result = align_pipeline(dir.file("s.nt"), dir.file("t.nt"), c, 0.9, false);
  REQUIRE(result.alignment.size() == 2);
  for (const auto& m : result.alignment.mappings) {
    CHECK(m.confidence >= 1.0 - 1e-9);
    CHECK(m.source_iri.substr(0, 9) == "http://s/");
    CHECK(m.target_iri.substr(0, 9) == "http://t/");
    // shared label: the IRIs differ only in their namespace
    CHECK(m.source_iri.substr(9) == m.target_iri.substr(9));
  }
}

TEST_CASE("pipeline is deterministic for a fixed seed") {
  TempDir dir("pipedet");
  write_file(dir.file("s.nt"),
             "<http://s/#A> <http://v/#r> <http://s/#B> .\n"
             "<http://s/#B> <http://v/#r> <http://s/#C> .\n"
             "<http://s/#C> <http://v/#q> <http://s/#A> .\n");
  write_file(dir.file("t.nt"),
             "<http://t/#A> <http://v/#r> <http://t/#Bx> .\n"
             "<http://t/#Bx> <http://v/#r> <http://t/#C> .\n");
  TrainingConfig c;
  c.model = ModelKind::rotate;
  c.dim = 8;
  c.epochs = 3;
  c.seed = 7;
  const auto r1 = align_pipeline(dir.file("s.nt"), dir.file("t.nt"), c, 0.0, false);
  const auto r2 = align_pipeline(dir.file("s.nt"), dir.file("t.nt"), c, 0.0, false);
  REQUIRE(r1.alignment.size() == r2.alignment.size());
  for (std::size_t i = 0; i < r1.alignment.size(); ++i) {
    CHECK(r1.alignment.mappings[i] == r2.alignment.mappings[i]);
  }
}

TEST_CASE("disjoint labels produce nothing above a 0.999 threshold by contract") {
  TempDir dir("pipedisj");
  write_file(dir.file("s.nt"), "<http://s/#A> <http://v/#r> <http://s/#B> .\n");
  write_file(dir.file("t.nt"), "<http://t/#X> <http://v/#r> <http://t/#Y> .\n");
  TrainingConfig c;
  c.model = ModelKind::transe;
  c.dim = 8;
  c.epochs = 2;
  c.seed = 11;
  const auto result = align_pipeline(dir.file("s.nt"), dir.file("t.nt"), c, 0.999, false);
  for (const auto& m : result.alignment.mappings) CHECK(m.confidence >= 0.999);
}

TEST_CASE("pipeline errors carry their stage tag") {
  TrainingConfig c;
  try {
    align_pipeline("/nonexistent/source.nt", "/nonexistent/target.nt", c, 0.0, true);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("[parse:source]") != std::string::npos);
  }
}

TEST_SUITE_END();
