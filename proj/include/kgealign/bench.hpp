#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kgealign/alignment.hpp"

namespace kgealign {

enum class RenameScheme { suffix, scramble };

RenameScheme parse_rename_scheme(const std::string& name);
const char* rename_scheme_name(RenameScheme scheme);

struct BenchSpec {
  std::size_t num_concepts = 50;
  std::size_t num_relations = 3;
  double density = 3.0;          // structural triples per concept
  double anchor_fraction = 0.3;  // fraction of target labels kept verbatim
  RenameScheme rename_scheme = RenameScheme::suffix;
  std::uint64_t seed = 7;

  void validate() const;
};

struct BenchResult {
  std::string source_ntriples;
  std::string target_ntriples;
  ReferenceAlignment reference;
  std::vector<std::size_t> anchor_concepts;  // indices of label-preserved concepts
};

// Paired synthetic ontologies over a preferential-attachment concept graph
// (spanning backbone first, so the graph is connected), every concept
// typed as a class. The target is a structural clone; anchor_fraction of
// its labels are kept verbatim and the rest renamed per scheme. The
// reference maps every source concept to its clone. Deterministic per
// seed.
BenchResult generate(const BenchSpec& spec);

struct BenchPaths {
  std::string source_path;
  std::string target_path;
  std::string reference_path;
};

// Writes source.nt, target.nt and reference.tsv under out_dir.
BenchPaths write_benchmark(const BenchSpec& spec, const std::string& out_dir);

}  // namespace kgealign
