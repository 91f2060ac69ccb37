#include <doctest.h>

#include "grad_check.hpp"
#include "helpers.hpp"
#include "kgealign/checkpoint.hpp"
#include "kgealign/errors.hpp"

using namespace kgealign;
using kgealign::testing::TempDir;
using kgealign::testing::all_model_kinds;

TEST_SUITE_BEGIN("checkpoint");

TEST_CASE("checkpoints round-trip bit-exactly for every model") {
  TempDir dir("ckpt");
  std::uint64_t seed = 0;
  for (const auto kind : all_model_kinds()) {
    Rng rng(500 + seed++);
    ModelCheckpoint ck;
    ck.params = init_params(kind, 6, 2, 8, rng);
    TrainingConfig cfg;
    cfg.model = kind;
    cfg.seed = seed;
    ck.config = cfg;

    const std::string path = dir.file(std::string(model_name(kind)) + ".json");
    save_checkpoint(ck, path);
    const ModelCheckpoint back = load_checkpoint(path);

    CHECK(back.params.kind == ck.params.kind);
    CHECK(back.params.dim == ck.params.dim);
    CHECK(back.params.num_entities == ck.params.num_entities);
    CHECK(back.params.num_relations == ck.params.num_relations);
    REQUIRE(back.params.tensors.size() == ck.params.tensors.size());
    for (std::size_t i = 0; i < ck.params.tensors.size(); ++i) {
      CHECK(back.params.tensors[i].name == ck.params.tensors[i].name);
      CHECK(back.params.tensors[i].rows == ck.params.tensors[i].rows);
      CHECK(back.params.tensors[i].cols == ck.params.tensors[i].cols);
      CHECK(back.params.tensors[i].data == ck.params.tensors[i].data);  // bitwise
    }
    REQUIRE(back.config.has_value());
    CHECK(back.config->model == kind);
    CHECK(back.config->seed == seed);
  }
}

TEST_CASE("awkward double values survive the text format") {
  ModelCheckpoint ck;
  Rng rng(1);
  ck.params = init_params(ModelKind::transe, 2, 1, 4, rng);
  auto row = ck.params.tensors[0].row(0);
  row[0] = 0.1;                       // not exactly representable
  row[1] = 1e-300;                    // near-denormal
  row[2] = -3.0000000000000004;       // differs from -3.0 by one ulp
  row[3] = 1.7976931348623157e308;    // DBL_MAX
  const ModelCheckpoint back = checkpoint_from_json(checkpoint_to_json(ck));
  CHECK(back.params.tensors[0].data == ck.params.tensors[0].data);
}

TEST_CASE("corrupt checkpoints are rejected") {
  CHECK_THROWS_AS(checkpoint_from_json("{not json"), Error);
  CHECK_THROWS_AS(checkpoint_from_json("{\"format\": \"other\"}"), Error);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), Error);
}

TEST_SUITE_END();
