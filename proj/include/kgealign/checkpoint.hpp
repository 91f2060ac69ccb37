#pragma once

#include <optional>
#include <string>

#include "kgealign/models.hpp"
#include "kgealign/train_config.hpp"

namespace kgealign {

// Self-describing JSON container: model kind, dim, tensor shapes, row-major
// tensor data, and the vocabulary sizes the model was trained against.
// Doubles are serialized with shortest round-trip precision, so a
// save/load cycle reproduces every tensor bit-exactly.
struct ModelCheckpoint {
  ModelParams params;
  std::optional<TrainingConfig> config;
};

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path);
ModelCheckpoint load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const ModelCheckpoint& checkpoint);
ModelCheckpoint checkpoint_from_json(const std::string& json_text);

}  // namespace kgealign
