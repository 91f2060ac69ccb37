#pragma once

#include <cstdint>
#include <string>

#include "kgealign/models.hpp"

namespace kgealign {

// Run hyperparameters. Defaults: embedding dim 200, 20 epochs, train batch
// 64, eval batch 128, 5 negatives per positive.
struct TrainingConfig {
  std::size_t dim = 200;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  std::size_t num_negatives = 5;
  std::size_t eval_batch_size = 128;  // similarity row-block size, not a trainer knob
  double learning_rate = 0.01;
  double margin = 1.0;
  std::uint64_t seed = 42;
  ModelKind model = ModelKind::transe;
  bool transe_l1 = false;

  void validate() const;
};

// Flat `key = value` (or `key: value`) document; '#' starts a comment.
// Keys mirror the field names above. Unknown keys are errors.
TrainingConfig parse_config_text(const std::string& text, TrainingConfig base = {});
TrainingConfig load_config(const std::string& path, TrainingConfig base = {});

}  // namespace kgealign
