#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "kgealign/errors.hpp"
#include "kgealign/triples.hpp"

using namespace kgealign;
using kgealign::testing::make_document;

TEST_SUITE_BEGIN("factory");

TEST_CASE("identical text triples across sides collapse to one") {
  const auto src = make_document(Side::source, {{"alpha", "rel", "beta"}}, "http://src/#");
  const auto tgt = make_document(Side::target, {{"alpha", "rel", "beta"}}, "http://tgt/#");
  const auto f = build_factory(src, tgt);
  CHECK(f.triples.size() == 1);
  CHECK(f.vocabulary.num_entities() == 2);
  CHECK(f.vocabulary.num_relations() == 1);
  CHECK(f.source_entity_ids.size() == 2);
  CHECK(f.target_entity_ids.size() == 2);
}

TEST_CASE("shared label merges, distinct labels do not") {
  const auto src = make_document(Side::source, {{"alpha", "subclassof", "beta"}}, "http://src/#");
  const auto tgt = make_document(Side::target, {{"alpha", "subclassof", "gamma"}}, "http://tgt/#");
  const auto f = build_factory(src, tgt);
  CHECK(f.triples.size() == 2);
  CHECK(f.vocabulary.num_entities() == 3);
  CHECK(f.vocabulary.num_relations() == 1);

  const EntityId alpha = f.vocabulary.entity_to_id.at("alpha");
  const auto& entry = f.catalog.entries[alpha];
  CHECK(entry.source_iris == std::vector<std::string>{"http://src/#alpha"});
  CHECK(entry.target_iris == std::vector<std::string>{"http://tgt/#alpha"});
  auto in = [](const std::vector<EntityId>& ids, EntityId id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
  };
  CHECK(in(f.source_entity_ids, alpha));
  CHECK(in(f.target_entity_ids, alpha));
}

TEST_CASE("labels normalize before merging") {
  const auto src = make_document(Side::source, {{"Left  Kidney", "p", "x"}}, "http://src/#");
  const auto tgt = make_document(Side::target, {{"left kidney", "p", "y"}}, "http://tgt/#");
  const auto f = build_factory(src, tgt);
  CHECK(f.vocabulary.entity_to_id.count("left kidney") == 1);
  CHECK(f.vocabulary.num_entities() == 3);
}

TEST_CASE("disjoint 440 + 173 gives exactly 613 triples; overlap shrinks it") {
  std::vector<std::array<std::string, 3>> src, tgt;
  for (int i = 0; i < 440; ++i)
    src.push_back({"s" + std::to_string(i), "r", "s" + std::to_string(i + 1)});
  for (int i = 0; i < 173; ++i)
    tgt.push_back({"t" + std::to_string(i), "r", "t" + std::to_string(i + 1)});
  const auto f = build_factory(make_document(Side::source, src, "http://src/#"),
                               make_document(Side::target, tgt, "http://tgt/#"));
  CHECK(f.triples.size() == 613);

  tgt[0] = {"s0", "r", "s1"};  // now one triple coincides textually
  const auto g = build_factory(make_document(Side::source, src, "http://src/#"),
                               make_document(Side::target, tgt, "http://tgt/#"));
  CHECK(g.triples.size() == 612);
}

TEST_CASE("duplicate triples within one side are deduplicated") {
  const auto src = make_document(
      Side::source, {{"a", "p", "b"}, {"a", "p", "b"}, {"a", "p", "c"}}, "http://src/#");
  const auto tgt = make_document(Side::target, {{"z", "p", "z"}}, "http://tgt/#");
  const auto f = build_factory(src, tgt);
  CHECK(f.triples.size() == 3);  // self-loop on z is kept
}

TEST_CASE("empty factory is rejected") {
  OntologyDocument src, tgt;
  src.side = Side::source;
  tgt.side = Side::target;
  CHECK_THROWS_WITH_AS(build_factory(src, tgt), doctest::Contains("empty factory"), Error);
}

TEST_CASE("class flags are tracked per side") {
  auto src = make_document(Side::source, {{"a", "p", "b"}}, "http://src/#");
  src.class_entities.insert("http://src/#a");
  const auto tgt = make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#");
  const auto f = build_factory(src, tgt);
  const EntityId a = f.vocabulary.entity_to_id.at("a");
  CHECK(f.catalog.entries[a].is_class_source);
  CHECK_FALSE(f.catalog.entries[a].is_class_target);
}

TEST_CASE("every entity id is reachable in the catalog with at least one IRI") {
  const auto f = kgealign::testing::star_factory();
  REQUIRE(f.catalog.entries.size() == f.vocabulary.num_entities());
  for (const auto& entry : f.catalog.entries) {
    CHECK(entry.source_iris.size() + entry.target_iris.size() >= 1);
    CHECK(std::is_sorted(entry.source_iris.begin(), entry.source_iris.end()));
    CHECK(std::is_sorted(entry.target_iris.begin(), entry.target_iris.end()));
  }
  for (const auto& t : f.triples) {
    CHECK(t.h < f.vocabulary.num_entities());
    CHECK(t.t < f.vocabulary.num_entities());
    CHECK(t.r < f.vocabulary.num_relations());
  }
}

TEST_CASE("negative sampling") {
  const auto f = kgealign::testing::star_factory();
  SUBCASE("k=5 over a 64-positive batch yields 320 negatives") {
    std::vector<IdTriple> batch;
    for (std::size_t i = 0; i < 64; ++i) batch.push_back(f.triples[i % f.triples.size()]);
    Rng rng(1);
    const auto negs = sample_negatives(f, batch, 5, rng);
    std::size_t total = 0;
    for (const auto& per_pos : negs.negatives) {
      CHECK(per_pos.size() == 5);
      total += per_pos.size();
    }
    CHECK(total == 320);
  }
  SUBCASE("each negative differs from its positive in exactly one slot") {
    Rng rng(2);
    const auto negs = sample_negatives(f, f.triples, 5, rng);
    for (std::size_t i = 0; i < negs.positives.size(); ++i) {
      const auto& pos = negs.positives[i];
      for (const auto& neg : negs.negatives[i]) {
        CHECK(neg.r == pos.r);
        const bool head_changed = neg.h != pos.h;
        const bool tail_changed = neg.t != pos.t;
        CHECK(head_changed != tail_changed);
      }
    }
  }
  SUBCASE("two entities force the only alternative") {
    const auto two = build_factory(
        make_document(Side::source, {{"a", "p", "b"}}, "http://src/#"),
        make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
    Rng rng(3);
    const auto negs = sample_negatives(two, two.triples, 8, rng);
    const EntityId a = two.vocabulary.entity_to_id.at("a");
    const EntityId b = two.vocabulary.entity_to_id.at("b");
    for (const auto& neg : negs.negatives[0]) {
      const bool head_corrupted = neg.h == b && neg.t == b;
      const bool tail_corrupted = neg.h == a && neg.t == a;
      CHECK((head_corrupted || tail_corrupted));
    }
  }
  SUBCASE("single-entity factory cannot be corrupted") {
    const auto one = build_factory(
        make_document(Side::source, {{"a", "p", "a"}}, "http://src/#"),
        make_document(Side::target, {{"a", "p", "a"}}, "http://tgt/#"));
    Rng rng(4);
    CHECK_THROWS_WITH_AS(sample_negatives(one, one.triples, 1, rng),
                         doctest::Contains("cannot corrupt"), Error);
  }
  SUBCASE("seeded sampling is reproducible") {
    Rng rng_a(42), rng_b(42);
    const auto a = sample_negatives(f, f.triples, 5, rng_a);
    const auto b = sample_negatives(f, f.triples, 5, rng_b);
    CHECK(a.negatives == b.negatives);
  }
}

TEST_CASE("epoch batches") {
  const auto ten = build_factory(
      make_document(Side::source,
                    {{"a", "p", "b"}, {"b", "p", "c"}, {"c", "p", "d"}, {"d", "p", "e"},
                     {"e", "p", "f"}, {"f", "p", "g"}, {"g", "p", "h"}, {"h", "p", "i"},
                     {"i", "p", "j"}, {"j", "p", "a"}},
                    "http://src/#"),
      make_document(Side::target, {{"a", "p", "b"}}, "http://tgt/#"));
  REQUIRE(ten.triples.size() == 10);

  SUBCASE("chunk sizes follow batch_size") {
    Rng rng(5);
    const auto batches = epoch_batches(ten, 4, rng);
    REQUIRE(batches.size() == 3);
    CHECK(batches[0].size() == 4);
    CHECK(batches[1].size() == 4);
    CHECK(batches[2].size() == 2);
  }
  SUBCASE("oversized batch gives one chunk") {
    Rng rng(6);
    const auto batches = epoch_batches(ten, 64, rng);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0].size() == 10);
  }
  SUBCASE("same seed, same permutation; coverage is exact") {
    Rng rng_a(7), rng_b(7);
    const auto a = epoch_batches(ten, 3, rng_a);
    const auto b = epoch_batches(ten, 3, rng_b);
    CHECK(a == b);
    std::multiset<IdTriple> seen;
    for (const auto& batch : a) seen.insert(batch.begin(), batch.end());
    std::multiset<IdTriple> expected(ten.triples.begin(), ten.triples.end());
    CHECK(seen == expected);
  }
}

TEST_CASE("debug dumps are well-formed") {
  const auto f = kgealign::testing::star_factory();
  const auto triples = dump_triples_tsv(f);
  CHECK(std::count(triples.begin(), triples.end(), '\n') == 1 + f.triples.size());
  const auto vocab = dump_vocabulary_tsv(f.vocabulary);
  CHECK(vocab.find("entity\t0\t") != std::string::npos);
  CHECK(vocab.find("relation\t0\t") != std::string::npos);
}

TEST_SUITE_END();
