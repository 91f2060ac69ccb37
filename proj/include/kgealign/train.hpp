#pragma once

#include <vector>

#include "kgealign/models.hpp"
#include "kgealign/train_config.hpp"
#include "kgealign/triples.hpp"

namespace kgealign {

struct TrainingTrace {
  std::vector<double> epoch_mean_loss;  // one entry per epoch
  double wall_clock_seconds = 0.0;
};

// Margin-ranking training with plain SGD: per batch, loss terms
// max(0, margin - f(positive) + f(negative)) over all negatives, gradients
// accumulated then applied once, constraints re-projected. Epoch e draws
// its shuffle and corruptions from a generator seeded `seed + e`, so a run
// is a pure function of (factory, config).
std::pair<ModelParams, TrainingTrace> train(const TripleFactory& factory,
                                            const TrainingConfig& config);

// Continues training for extra_epochs more epochs; epoch numbering (and
// therefore per-epoch seeding) picks up where the checkpoint stopped, so
// a split run revisits the exact epoch streams a straight run would use.
std::pair<ModelParams, TrainingTrace> resume(const ModelParams& params,
                                             const TrainingConfig& config,
                                             const TripleFactory& factory,
                                             std::size_t completed_epochs,
                                             std::size_t extra_epochs);

}  // namespace kgealign
