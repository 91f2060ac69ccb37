#pragma once

#include <unistd.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kgealign/models.hpp"
#include "kgealign/rdf.hpp"
#include "kgealign/triples.hpp"

namespace kgealign::testing {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgealign_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Statement make_statement(const std::string& s, const std::string& p,
                                const std::string& o, const std::string& ns = "http://x/") {
  Statement st;
  st.subject_iri = ns + s;
  st.subject_label = s;
  st.predicate_iri = ns + p;
  st.predicate_label = p;
  st.object_iri = ns + o;
  st.object_label = o;
  return st;
}

inline OntologyDocument make_document(Side side,
                                      const std::vector<std::array<std::string, 3>>& triples,
                                      const std::string& ns = "http://x/") {
  OntologyDocument doc;
  doc.side = side;
  for (const auto& t : triples) doc.statements.push_back(make_statement(t[0], t[1], t[2], ns));
  return doc;
}

// Star-shaped fixture: 20 entities, 2 relations, 40 triples. Hub 0 points
// at every spoke with r0; every spoke points back with r1; two extra edges
// close the count at 40.
inline TripleFactory star_factory() {
  std::vector<std::array<std::string, 3>> src, tgt;
  auto name = [](std::size_t i) { return "e" + std::to_string(i); };
  for (std::size_t i = 1; i < 20; ++i) {
    src.push_back({name(0), "r0", name(i)});
    src.push_back({name(i), "r1", name(0)});
  }
  src.push_back({name(1), "r0", name(2)});
  src.push_back({name(2), "r1", name(3)});
  // Target repeats a subset so both sides are non-empty; duplicates dedup.
  tgt.push_back({name(0), "r0", name(1)});
  return build_factory(make_document(Side::source, src, "http://src/"),
                       make_document(Side::target, tgt, "http://tgt/"));
}

// Mean score over the training triples vs. mean over every one-slot
// corruption (all alternative heads and all alternative tails).
struct SeparationStats {
  double mean_positive = 0.0;
  double mean_corrupted = 0.0;
};

inline SeparationStats separation_by_enumeration(const ModelParams& params,
                                                 const TripleFactory& factory) {
  SeparationStats stats;
  double pos_sum = 0.0, neg_sum = 0.0;
  std::size_t neg_count = 0;
  const std::size_t n = factory.vocabulary.num_entities();
  for (const auto& triple : factory.triples) {
    pos_sum += score(params, triple.h, triple.r, triple.t);
    for (std::size_t e = 0; e < n; ++e) {
      if (e != triple.h) {
        neg_sum += score(params, e, triple.r, triple.t);
        ++neg_count;
      }
      if (e != triple.t) {
        neg_sum += score(params, triple.h, triple.r, e);
        ++neg_count;
      }
    }
  }
  stats.mean_positive = pos_sum / static_cast<double>(factory.triples.size());
  stats.mean_corrupted = neg_sum / static_cast<double>(neg_count);
  return stats;
}

}  // namespace kgealign::testing
