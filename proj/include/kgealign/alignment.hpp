#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace kgealign {

// One scored correspondence between a source and a target entity.
struct Mapping {
  std::string source_iri;
  std::string target_iri;
  std::string relation = "=";  // equivalence only
  double confidence = 0.0;

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

struct Alignment {
  std::vector<Mapping> mappings;
  double tau = 0.0;       // threshold that was applied
  std::string model;      // model kind name, informational

  std::size_t size() const { return mappings.size(); }
};

// Gold-standard pairs. Confidence-free; deduplicated on (source, target).
struct ReferenceAlignment {
  std::set<std::pair<std::string, std::string>> pairs;
  // (source_iri, target_iri, relation) in first-seen order
  std::vector<std::tuple<std::string, std::string, std::string>> ordered;

  bool contains(const std::string& s, const std::string& t) const {
    return pairs.count({s, t}) > 0;
  }
  // Returns false when the (source, target) pair was already present.
  bool add(std::string s, std::string t, std::string rel) {
    if (!pairs.insert({s, t}).second) return false;
    ordered.emplace_back(std::move(s), std::move(t), std::move(rel));
    return true;
  }
  std::size_t size() const { return pairs.size(); }
};

}  // namespace kgealign
