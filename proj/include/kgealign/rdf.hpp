#pragma once

#include <set>
#include <string>
#include <vector>

#include "kgealign/alignment.hpp"

namespace kgealign {

enum class Side { source, target };

inline const char* side_name(Side s) { return s == Side::source ? "source" : "target"; }

// One parsed triple. Labels are resolved but not normalized; vocabulary
// normalization happens when the triple factory is built.
struct Statement {
  std::string subject_iri;
  std::string subject_label;
  std::string predicate_iri;
  std::string predicate_label;
  std::string object_iri;  // absolute IRI, or the quoted lexical form for literals
  std::string object_label;
  bool object_is_literal = false;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct OntologyDocument {
  std::vector<Statement> statements;
  std::set<std::string> class_entities;  // IRIs taking part in class assertions
  Side side = Side::source;
};

// Well-known vocabulary IRIs consumed by the parser.
inline constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr const char* kRdfsSubClassOf = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr const char* kOwlClass = "http://www.w3.org/2002/07/owl#Class";

// Lowercase, trim, collapse internal whitespace runs to single spaces.
std::string normalize_label(const std::string& raw);

// Parses N-Triples or the supported Turtle subset (@prefix, prefixed
// names, the `a` keyword, `;` predicate lists and `,` object lists).
// Labels come from rdfs:label (preferring @en, then untagged, then first
// seen), falling back to the IRI fragment, then the last path segment.
OntologyDocument parse_ontology(const std::string& path, Side side);

// Same grammar, reading from an in-memory buffer; `name` is used in errors.
OntologyDocument parse_ontology_text(const std::string& text, Side side,
                                     const std::string& name = "<buffer>");

// Reads reference pairs from the alignment TSV format or the minimal
// alignment-XML cell subset (entity1/entity2/relation/measure).
ReferenceAlignment load_reference(const std::string& path);
ReferenceAlignment load_reference_text(const std::string& text,
                                       const std::string& name = "<buffer>");

enum class AlignmentFormat { tsv, xml };

void write_alignment(const Alignment& alignment, const std::string& path,
                     AlignmentFormat format);
std::string format_alignment(const Alignment& alignment, AlignmentFormat format);

}  // namespace kgealign
