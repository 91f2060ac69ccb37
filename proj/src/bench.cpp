#include "kgealign/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "kgealign/errors.hpp"
#include "kgealign/rdf.hpp"
#include "kgealign/rng.hpp"

namespace kgealign {

RenameScheme parse_rename_scheme(const std::string& name) {
  if (name == "suffix") return RenameScheme::suffix;
  if (name == "scramble") return RenameScheme::scramble;
  throw invalid_error("unknown rename scheme '" + name + "'; expected suffix or scramble");
}

const char* rename_scheme_name(RenameScheme scheme) {
  return scheme == RenameScheme::suffix ? "suffix" : "scramble";
}

void BenchSpec::validate() const {
  if (num_concepts < 1) throw invalid_error("num_concepts must be >= 1");
  if (num_relations < 1) throw invalid_error("num_relations must be >= 1");
  if (!(density > 0.0)) throw invalid_error("density must be > 0");
  if (anchor_fraction < 0.0 || anchor_fraction > 1.0)
    throw invalid_error("anchor_fraction must lie in [0, 1]");
  if (anchor_fraction * static_cast<double>(num_concepts) < 1.0)
    throw invalid_error("anchor_fraction * num_concepts must be >= 1");
}

namespace {

constexpr const char* kSourceNs = "http://bench.example/source#";
constexpr const char* kTargetNs = "http://bench.example/target#";
constexpr const char* kVocabNs = "http://bench.example/vocab#";

struct Edge {
  std::size_t from;
  std::size_t to;
  std::size_t relation;
};

// Weighted draw proportional to degree + 1 over nodes [0, limit).
std::size_t preferential_pick(const std::vector<std::size_t>& degree, std::size_t limit,
                              Rng& rng) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < limit; ++i) total += degree[i] + 1;
  std::uint64_t ticket = rng.next_index(total);
  for (std::size_t i = 0; i < limit; ++i) {
    const std::uint64_t w = degree[i] + 1;
    if (ticket < w) return i;
    ticket -= w;
  }
  return limit - 1;
}

std::vector<Edge> generate_edges(const BenchSpec& spec, Rng& rng) {
  const std::size_t n = spec.num_concepts;
  std::vector<std::size_t> degree(n, 0);
  std::vector<Edge> edges;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

  auto add_edge = [&](std::size_t from, std::size_t to, std::size_t rel) {
    edges.push_back({from, to, rel});
    seen.insert({from, to, rel});
    ++degree[from];
    ++degree[to];
  };

  // Spanning backbone: node i attaches to a preferred earlier node.
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t parent = preferential_pick(degree, i, rng);
    add_edge(i, parent, rng.next_index(spec.num_relations));
  }

  const auto total =
      static_cast<std::size_t>(std::llround(spec.density * static_cast<double>(n)));
  std::size_t attempts = 0;
  while (edges.size() < total && attempts < total * 50 + 100) {
    ++attempts;
    if (n < 2) break;
    const std::size_t u = preferential_pick(degree, n, rng);
    std::size_t v = preferential_pick(degree, n, rng);
    if (u == v) continue;
    const std::size_t rel = rng.next_index(spec.num_relations);
    if (seen.count({u, v, rel})) continue;
    add_edge(u, v, rel);
  }
  return edges;
}

std::string concept_fragment(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "concept_%03zu", i);
  return buf;
}

std::string relation_iri(std::size_t j) {
  return std::string(kVocabNs) + "rel_" + std::to_string(j);
}

std::string render_side(const std::string& ns, const std::vector<std::string>& fragments,
                        const std::vector<Edge>& edges) {
  std::ostringstream out;
  for (const auto& frag : fragments)
    out << "<" << ns << frag << "> <" << kRdfType << "> <" << kOwlClass << "> .\n";
  for (const auto& e : edges)
    out << "<" << ns << fragments[e.from] << "> <" << relation_iri(e.relation) << "> <" << ns
        << fragments[e.to] << "> .\n";
  return out.str();
}

}  // namespace

BenchResult generate(const BenchSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.num_concepts;

  // Anchor set: a seeded subset of concepts keeps identical labels.
  const auto num_anchors = static_cast<std::size_t>(
      std::llround(spec.anchor_fraction * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::size_t> anchors(order.begin(),
                                   order.begin() + static_cast<std::ptrdiff_t>(num_anchors));
  std::sort(anchors.begin(), anchors.end());
  std::vector<bool> is_anchor(n, false);
  for (std::size_t a : anchors) is_anchor[a] = true;

  const std::vector<Edge> edges = generate_edges(spec, rng);

  std::vector<std::string> source_fragments(n), target_fragments(n);
  for (std::size_t i = 0; i < n; ++i) {
    source_fragments[i] = concept_fragment(i);
    if (is_anchor[i]) {
      target_fragments[i] = source_fragments[i];
    } else if (spec.rename_scheme == RenameScheme::suffix) {
      target_fragments[i] = source_fragments[i] + "_alt";
    } else {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "node_%03zu_%08llx", i,
                    static_cast<unsigned long long>(rng.next_u64() & 0xffffffffULL));
      target_fragments[i] = buf;
    }
  }

  BenchResult result;
  result.source_ntriples = render_side(kSourceNs, source_fragments, edges);
  result.target_ntriples = render_side(kTargetNs, target_fragments, edges);
  for (std::size_t i = 0; i < n; ++i)
    result.reference.add(kSourceNs + source_fragments[i], kTargetNs + target_fragments[i], "=");
  result.anchor_concepts = std::move(anchors);
  return result;
}

BenchPaths write_benchmark(const BenchSpec& spec, const std::string& out_dir) {
  const BenchResult result = generate(spec);
  std::filesystem::create_directories(out_dir);

  BenchPaths paths;
  paths.source_path = (std::filesystem::path(out_dir) / "source.nt").string();
  paths.target_path = (std::filesystem::path(out_dir) / "target.nt").string();
  paths.reference_path = (std::filesystem::path(out_dir) / "reference.tsv").string();

  auto dump = [](const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open file for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw io_error("write failure: " + path);
  };
  dump(paths.source_path, result.source_ntriples);
  dump(paths.target_path, result.target_ntriples);

  Alignment ref_as_alignment;
  ref_as_alignment.tau = 0.0;
  for (const auto& [s, t, rel] : result.reference.ordered)
    ref_as_alignment.mappings.push_back(Mapping{s, t, rel, 1.0});
  write_alignment(ref_as_alignment, paths.reference_path, AlignmentFormat::tsv);
  return paths;
}

}  // namespace kgealign
