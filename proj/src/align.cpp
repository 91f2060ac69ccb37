#include "kgealign/align.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "kgealign/errors.hpp"
#include "kgealign/rdf.hpp"

namespace kgealign {

namespace {

bool side_has_class(const CatalogEntry& entry, Side side) {
  return side == Side::source ? entry.is_class_source : entry.is_class_target;
}

}  // namespace

SideEmbeddings extract_side(const ModelParams& params, const TripleFactory& factory,
                            Side side, bool class_only) {
  SideEmbeddings out;
  for (const EntityId id : factory.side_ids(side)) {
    if (class_only && !side_has_class(factory.catalog.entries[id], side)) continue;
    out.entity_ids.push_back(id);
  }
  if (out.entity_ids.empty())
    throw invalid_error(std::string("no ") + side_name(side) + " entities to extract" +
                        (class_only ? " (class_only is on)" : ""));

  const NamedTensor& entity = params.tensors[0];
  out.dim = entity.cols;
  out.matrix.resize(out.entity_ids.size() * out.dim);
  for (std::size_t i = 0; i < out.entity_ids.size(); ++i) {
    const EntityId id = out.entity_ids[i];
    if (id >= entity.rows) throw invalid_error("entity id out of range for model");
    const auto src = entity.row(id);
    double norm_sq = 0.0;
    for (double v : src) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0)
      throw invalid_error("zero-norm embedding for entity '" +
                          factory.vocabulary.entity_text[id] + "' (id " + std::to_string(id) +
                          ")");
    for (std::size_t j = 0; j < out.dim; ++j) out.matrix[i * out.dim + j] = src[j] / norm;
  }
  return out;
}

SimilarityMatrix similarity(const SideEmbeddings& source, const SideEmbeddings& target,
                            std::size_t row_block) {
  if (source.dim != target.dim)
    throw Error(ErrorKind::mismatch, "embedding dimension mismatch between sides");
  if (row_block < 1) throw invalid_error("row_block must be >= 1");

  SimilarityMatrix S;
  S.rows = source.rows();
  S.cols = target.rows();
  S.values.resize(S.rows * S.cols);
  const std::size_t d = source.dim;
  for (std::size_t block = 0; block < S.rows; block += row_block) {
    const std::size_t end = std::min(block + row_block, S.rows);
    for (std::size_t i = block; i < end; ++i) {
      const auto a = source.row(i);
      for (std::size_t j = 0; j < S.cols; ++j) {
        const auto b = target.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
        S.at(i, j) = s;
      }
    }
  }
  return S;
}

namespace {

struct Candidate {
  std::size_t source_row;
  std::size_t target_row;
  double theta;
};

const std::string& first_iri(const CatalogEntry& entry, Side side) {
  const auto& iris = side == Side::source ? entry.source_iris : entry.target_iris;
  if (iris.empty())
    throw invalid_error("catalog entry has no IRI on the requested side");
  return iris.front();  // lists are sorted, so front() is lexicographically first
}

}  // namespace

Alignment match(const SimilarityMatrix& S, const SideEmbeddings& source,
                const SideEmbeddings& target, const EntityCatalog& catalog, double tau) {
  if (S.rows != source.rows() || S.cols != target.rows())
    throw Error(ErrorKind::mismatch, "similarity matrix shape does not match sides");
  if (tau < -1.0 || tau > 1.0) throw invalid_error("tau must lie in [-1, 1]");

  // Step 1: per-source argmax, ties to the lower target index.
  std::vector<Candidate> candidates;
  candidates.reserve(S.rows);
  for (std::size_t i = 0; i < S.rows; ++i) {
    if (S.cols == 0) break;
    std::size_t best = 0;
    double best_theta = S.at(i, 0);
    for (std::size_t j = 1; j < S.cols; ++j) {
      if (S.at(i, j) > best_theta) {
        best = j;
        best_theta = S.at(i, j);
      }
    }
    candidates.push_back({i, best, best_theta});
  }

  // Step 2: greedy one-to-one by descending theta; dropped sources are
  // never reassigned.
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                            const Candidate& b) {
    if (a.theta != b.theta) return a.theta > b.theta;
    return a.source_row < b.source_row;
  });
  std::vector<bool> source_used(S.rows, false), target_used(S.cols, false);
  std::vector<Candidate> accepted;
  for (const Candidate& c : candidates) {
    if (source_used[c.source_row] || target_used[c.target_row]) continue;
    source_used[c.source_row] = true;
    target_used[c.target_row] = true;
    accepted.push_back(c);
  }

  // Step 3: threshold filter (last, so the greedy step is tau-independent).
  // Step 4: id -> IRI resolution.
  Alignment alignment;
  alignment.tau = tau;
  for (const Candidate& c : accepted) {
    if (c.theta < tau) continue;
    Mapping m;
    m.source_iri = first_iri(catalog.entries[source.entity_ids[c.source_row]], Side::source);
    m.target_iri = first_iri(catalog.entries[target.entity_ids[c.target_row]], Side::target);
    m.relation = "=";
    m.confidence = c.theta;
    alignment.mappings.push_back(std::move(m));
  }
  return alignment;
}

std::vector<MultiIriNote> multi_iri_notes(const Alignment& alignment,
                                          const SideEmbeddings& source,
                                          const SideEmbeddings& target,
                                          const EntityCatalog& catalog) {
  std::vector<MultiIriNote> notes;
  auto scan = [&](const SideEmbeddings& side_emb, Side side, auto get_iri) {
    std::map<std::string, const std::vector<std::string>*> by_first;
    for (const EntityId id : side_emb.entity_ids) {
      const auto& entry = catalog.entries[id];
      const auto& iris = side == Side::source ? entry.source_iris : entry.target_iris;
      if (iris.size() > 1) by_first.emplace(iris.front(), &iris);
    }
    for (const auto& m : alignment.mappings) {
      const auto it = by_first.find(get_iri(m));
      if (it == by_first.end()) continue;
      MultiIriNote note;
      note.side = side_name(side);
      note.chosen_iri = it->first;
      note.other_iris.assign(it->second->begin() + 1, it->second->end());
      notes.push_back(std::move(note));
    }
  };
  scan(source, Side::source, [](const Mapping& m) -> const std::string& { return m.source_iri; });
  scan(target, Side::target, [](const Mapping& m) -> const std::string& { return m.target_iri; });
  return notes;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + name + "] " + e.what(), 0);
  }
}

}  // namespace

PipelineResult align_pipeline(const std::string& source_path, const std::string& target_path,
                              const TrainingConfig& config, double tau, bool class_only) {
  const auto started = std::chrono::steady_clock::now();
  PipelineResult result;

  const OntologyDocument source_doc =
      stage("parse:source", [&] { return parse_ontology(source_path, Side::source); });
  const OntologyDocument target_doc =
      stage("parse:target", [&] { return parse_ontology(target_path, Side::target); });
  result.factory = stage("encode", [&] { return build_factory(source_doc, target_doc); });

  auto [params, trace] = stage("train", [&] { return train(result.factory, config); });
  result.params = std::move(params);
  result.trace = std::move(trace);

  result.source_side = stage("extract:source", [&] {
    return extract_side(result.params, result.factory, Side::source, class_only);
  });
  result.target_side = stage("extract:target", [&] {
    return extract_side(result.params, result.factory, Side::target, class_only);
  });
  result.sim = stage("similarity", [&] {
    return similarity(result.source_side, result.target_side, config.eval_batch_size);
  });
  result.alignment = stage("match", [&] {
    return match(result.sim, result.source_side, result.target_side, result.factory.catalog,
                 tau);
  });
  result.alignment.model = model_name(config.model);

  result.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace kgealign
