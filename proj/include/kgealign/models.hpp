#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kgealign/rng.hpp"

namespace kgealign {

enum class ModelKind {
  transe,
  transh,
  transr,
  transd,
  transf,
  distmult,
  complex_,
  hole,
  rotate,
  simple,
  quate,
  se,
  mure,
  boxe,
  crosse,
};

inline constexpr std::size_t kNumModelKinds = 15;

const char* model_name(ModelKind kind);
// Case-insensitive; throws listing the supported names on failure.
ModelKind parse_model_kind(const std::string& name);
std::vector<std::string> model_names();

enum class TensorRole { entity, relation, global };

struct NamedTensor {
  std::string name;
  TensorRole role = TensorRole::entity;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// All learnable state of one model. tensors[0] is always the primary
// entity tensor (the one the aligner extracts).
struct ModelParams {
  ModelKind kind = ModelKind::transe;
  std::size_t dim = 0;
  std::size_t num_entities = 0;
  std::size_t num_relations = 0;
  bool transe_l1 = false;  // TransE distance norm: L2 by default
  std::vector<NamedTensor> tensors;

  NamedTensor& tensor(const std::string& name);
  const NamedTensor& tensor(const std::string& name) const;
};

// Gradient of the score restricted to the parameter rows a triple touches.
struct GradSlice {
  std::size_t tensor = 0;  // index into ModelParams::tensors
  std::size_t row = 0;
  std::vector<double> values;
};

struct SparseGrad {
  std::vector<GradSlice> slices;  // unique (tensor, row), ascending

  // Accumulates into an existing slice or appends a zero-initialized one.
  std::span<double> slot(std::size_t tensor, std::size_t row, std::size_t cols);
};

// Uniform init in [-6/sqrt(d), +6/sqrt(d)] (RotatE phases uniform on the
// circle), translation-family entity rows normalized to unit length, then
// one constraint projection.
ModelParams init_params(ModelKind kind, std::size_t num_entities, std::size_t num_relations,
                        std::size_t dim, Rng& rng);

// Plausibility score, higher is better. Pure function of params.
double score(const ModelParams& params, std::size_t h, std::size_t r, std::size_t t);

// Analytic d(score)/d(touched rows). Matches central finite differences.
SparseGrad grad(const ModelParams& params, std::size_t h, std::size_t r, std::size_t t);

// In-place projection onto each model's feasible set: norm caps for the
// translation family, unit hyperplane normals, phase wrapping, box
// size reordering. Models without constraints are untouched.
void constrain(ModelParams& params);

bool all_finite(const ModelParams& params);

}  // namespace kgealign
