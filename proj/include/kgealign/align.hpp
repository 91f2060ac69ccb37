#pragma once

#include <string>
#include <vector>

#include "kgealign/alignment.hpp"
#include "kgealign/models.hpp"
#include "kgealign/train.hpp"
#include "kgealign/triples.hpp"

namespace kgealign {

// One side's entity embeddings, row-aligned with entity_ids and
// L2-normalized so similarity reduces to a dot product.
struct SideEmbeddings {
  std::vector<EntityId> entity_ids;
  std::size_t dim = 0;
  std::vector<double> matrix;  // row-major, |entity_ids| x dim

  std::span<const double> row(std::size_t i) const {
    return {matrix.data() + i * dim, dim};
  }
  std::size_t rows() const { return entity_ids.size(); }
};

struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

// Pulls the primary entity tensor rows for one side (head-role vectors for
// SimplE, base points for BoxE, full real-valued storage otherwise) and
// unit-normalizes each row. class_only keeps only that side's class
// entities.
SideEmbeddings extract_side(const ModelParams& params, const TripleFactory& factory,
                            Side side, bool class_only);

// S[i][j] = dot(source row i, target row j), computed in row blocks.
SimilarityMatrix similarity(const SideEmbeddings& source, const SideEmbeddings& target,
                            std::size_t row_block = 128);

// Per-source argmax candidates (ties: lower target index), greedy
// one-to-one by descending confidence (ties: lower source index, no
// reassignment), threshold filter last, then id -> IRI resolution via the
// lexicographically first IRI per side.
Alignment match(const SimilarityMatrix& S, const SideEmbeddings& source,
                const SideEmbeddings& target, const EntityCatalog& catalog, double tau);

// Entities whose mapping had to pick among several IRIs; surfaced so the
// extra IRIs are not silently lost.
struct MultiIriNote {
  std::string side;
  std::string chosen_iri;
  std::vector<std::string> other_iris;
};

std::vector<MultiIriNote> multi_iri_notes(const Alignment& alignment,
                                          const SideEmbeddings& source,
                                          const SideEmbeddings& target,
                                          const EntityCatalog& catalog);

// Everything the end-to-end run produces; kept so a threshold sweep can
// reuse the trained model and similarity matrix without retraining.
struct PipelineResult {
  TripleFactory factory;
  ModelParams params;
  TrainingTrace trace;
  SideEmbeddings source_side;
  SideEmbeddings target_side;
  SimilarityMatrix sim;
  Alignment alignment;
  double total_seconds = 0.0;
};

// parse -> build_factory -> train -> extract both sides -> similarity ->
// match. Errors from each stage are re-thrown tagged with the stage name.
PipelineResult align_pipeline(const std::string& source_path, const std::string& target_path,
                              const TrainingConfig& config, double tau, bool class_only);

}  // namespace kgealign
