#include "kgealign/triples.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

EntityId intern_entity(Vocabulary& vocab, const std::string& text) {
  const auto it = vocab.entity_to_id.find(text);
  if (it != vocab.entity_to_id.end()) return it->second;
  const EntityId id = static_cast<EntityId>(vocab.entity_text.size());
  vocab.entity_to_id.emplace(text, id);
  vocab.entity_text.push_back(text);
  return id;
}

RelationId intern_relation(Vocabulary& vocab, const std::string& text) {
  const auto it = vocab.relation_to_id.find(text);
  if (it != vocab.relation_to_id.end()) return it->second;
  const RelationId id = static_cast<RelationId>(vocab.relation_text.size());
  vocab.relation_to_id.emplace(text, id);
  vocab.relation_text.push_back(text);
  return id;
}

void record_iri(std::vector<std::string>& iris, const std::string& iri) {
  iris.push_back(iri);
}

void finalize_iris(std::vector<std::string>& iris) {
  std::sort(iris.begin(), iris.end());
  iris.erase(std::unique(iris.begin(), iris.end()), iris.end());
}

}  // namespace

TripleFactory build_factory(const OntologyDocument& source, const OntologyDocument& target) {
  if (source.statements.empty() && target.statements.empty())
    throw invalid_error("empty factory: both ontologies have no statements");

  TripleFactory factory;
  std::set<IdTriple> seen;
  std::set<EntityId> source_ids;
  std::set<EntityId> target_ids;

  auto ingest = [&](const OntologyDocument& doc) {
    const bool is_source = doc.side == Side::source;
    auto& side_ids = is_source ? source_ids : target_ids;
    for (const auto& st : doc.statements) {
      const std::string h_text = normalize_label(st.subject_label);
      const std::string r_text = normalize_label(st.predicate_label);
      const std::string t_text = normalize_label(st.object_label);
      const EntityId h = intern_entity(factory.vocabulary, h_text);
      const RelationId r = intern_relation(factory.vocabulary, r_text);
      const EntityId t = intern_entity(factory.vocabulary, t_text);

      factory.catalog.entries.resize(factory.vocabulary.num_entities());
      auto& h_entry = factory.catalog.entries[h];
      auto& t_entry = factory.catalog.entries[t];
      record_iri(is_source ? h_entry.source_iris : h_entry.target_iris, st.subject_iri);
      record_iri(is_source ? t_entry.source_iris : t_entry.target_iris, st.object_iri);
      if (doc.class_entities.count(st.subject_iri)) {
        (is_source ? h_entry.is_class_source : h_entry.is_class_target) = true;
      }
      if (!st.object_is_literal && doc.class_entities.count(st.object_iri)) {
        (is_source ? t_entry.is_class_source : t_entry.is_class_target) = true;
      }
      side_ids.insert(h);
      side_ids.insert(t);

      const IdTriple triple{h, r, t};
      if (seen.insert(triple).second) factory.triples.push_back(triple);
    }
  };

  ingest(source);
  ingest(target);

  for (auto& entry : factory.catalog.entries) {
    finalize_iris(entry.source_iris);
    finalize_iris(entry.target_iris);
  }
  factory.source_entity_ids.assign(source_ids.begin(), source_ids.end());
  factory.target_entity_ids.assign(target_ids.begin(), target_ids.end());
  return factory;
}

NegativeBatch sample_negatives(const TripleFactory& factory,
                               const std::vector<IdTriple>& positives, std::size_t k,
                               Rng& rng) {
  if (k < 1) throw invalid_error("negative count k must be >= 1");
  if (positives.empty()) throw invalid_error("positive batch must be non-empty");
  const std::uint64_t num_entities = factory.vocabulary.num_entities();
  if (num_entities < 2)
    throw invalid_error("cannot corrupt: factory has fewer than 2 entities");

  NegativeBatch batch;
  batch.positives = positives;
  batch.negatives.resize(positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const IdTriple& pos = positives[i];
    auto& negs = batch.negatives[i];
    negs.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
      IdTriple neg = pos;
      const bool corrupt_head = rng.next_bool();
      const EntityId original = corrupt_head ? pos.h : pos.t;
      EntityId replacement = original;
      while (replacement == original)
        replacement = static_cast<EntityId>(rng.next_index(num_entities));
      (corrupt_head ? neg.h : neg.t) = replacement;
      negs.push_back(neg);
    }
  }
  return batch;
}

std::vector<std::vector<IdTriple>> epoch_batches(const TripleFactory& factory,
                                                 std::size_t batch_size, Rng& rng) {
  if (batch_size < 1) throw invalid_error("batch_size must be >= 1");
  std::vector<IdTriple> order = factory.triples;
  rng.shuffle(order);
  std::vector<std::vector<IdTriple>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(start + batch_size, order.size());
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::string dump_triples_tsv(const TripleFactory& factory) {
  std::ostringstream out;
  out << "h_id\tr_id\tt_id\n";
  for (const auto& t : factory.triples) out << t.h << "\t" << t.r << "\t" << t.t << "\n";
  return out.str();
}

std::string dump_vocabulary_tsv(const Vocabulary& vocabulary) {
  std::ostringstream out;
  out << "kind\tid\ttext\n";
  for (std::size_t i = 0; i < vocabulary.entity_text.size(); ++i)
    out << "entity\t" << i << "\t" << vocabulary.entity_text[i] << "\n";
  for (std::size_t i = 0; i < vocabulary.relation_text.size(); ++i)
    out << "relation\t" << i << "\t" << vocabulary.relation_text[i] << "\n";
  return out.str();
}

}  // namespace kgealign
