#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgealign/rdf.hpp"
#include "kgealign/rng.hpp"

namespace kgealign {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct IdTriple {
  EntityId h = 0;
  RelationId r = 0;
  EntityId t = 0;

  friend bool operator==(const IdTriple&, const IdTriple&) = default;
  friend auto operator<=>(const IdTriple&, const IdTriple&) = default;
};

// Dense ids over normalized label texts. Entities and relations share the
// same merging rule: equal text means equal id, across both ontologies.
struct Vocabulary {
  std::map<std::string, EntityId> entity_to_id;
  std::map<std::string, RelationId> relation_to_id;
  std::vector<std::string> entity_text;    // id -> text
  std::vector<std::string> relation_text;  // id -> text

  std::size_t num_entities() const { return entity_text.size(); }
  std::size_t num_relations() const { return relation_text.size(); }
};

// Recovers IRIs for mapping output; one entry per entity id.
struct CatalogEntry {
  std::vector<std::string> source_iris;  // sorted, duplicate-free
  std::vector<std::string> target_iris;
  bool is_class_source = false;
  bool is_class_target = false;
};

struct EntityCatalog {
  std::vector<CatalogEntry> entries;  // indexed by entity id
};

struct TripleFactory {
  std::vector<IdTriple> triples;  // deduplicated, first-seen order
  Vocabulary vocabulary;
  EntityCatalog catalog;
  std::vector<EntityId> source_entity_ids;  // sorted; sides may overlap
  std::vector<EntityId> target_entity_ids;

  const std::vector<EntityId>& side_ids(Side side) const {
    return side == Side::source ? source_entity_ids : target_entity_ids;
  }
};

struct NegativeBatch {
  std::vector<IdTriple> positives;
  std::vector<std::vector<IdTriple>> negatives;  // k per positive
};

// Merges both documents into one indexed store. Entities with equal
// normalized labels across sides collapse into a single id; that shared
// id is what ties the two graphs together during training.
TripleFactory build_factory(const OntologyDocument& source, const OntologyDocument& target);

// Bernoulli corruption: per negative, a fair coin picks head or tail, then
// the chosen slot is resampled uniformly until it differs from the
// original. No filtering against the true triple set.
NegativeBatch sample_negatives(const TripleFactory& factory,
                               const std::vector<IdTriple>& positives, std::size_t k,
                               Rng& rng);

// One epoch: a seeded uniform shuffle split into consecutive chunks; the
// last chunk may be short. Every triple appears exactly once.
std::vector<std::vector<IdTriple>> epoch_batches(const TripleFactory& factory,
                                                 std::size_t batch_size, Rng& rng);

// Debug dumps: `h_id  r_id  t_id` rows and `id  text` vocabularies.
std::string dump_triples_tsv(const TripleFactory& factory);
std::string dump_vocabulary_tsv(const Vocabulary& vocabulary);

}  // namespace kgealign
