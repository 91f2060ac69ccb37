#include "kgealign/train.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <string>

#include "kgealign/errors.hpp"

namespace kgealign {

namespace {

using Clock = std::chrono::steady_clock;

// Batch-level accumulator keyed by (tensor, row); std::map keeps the apply
// order fixed so summation is reproducible.
class GradAccumulator {
 public:
  void add(const SparseGrad& g, double weight) {
    for (const auto& slice : g.slices) {
      auto& acc = slots_[{slice.tensor, slice.row}];
      if (acc.empty()) acc.assign(slice.values.size(), 0.0);
      for (std::size_t i = 0; i < slice.values.size(); ++i)
        acc[i] += weight * slice.values[i];
    }
  }

  void apply(ModelParams& params, double learning_rate) const {
    for (const auto& [key, values] : slots_) {
      auto row = params.tensors[key.first].row(key.second);
      for (std::size_t i = 0; i < values.size(); ++i) row[i] -= learning_rate * values[i];
    }
  }

  void clear() { slots_.clear(); }

 private:
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> slots_;
};

std::pair<ModelParams, TrainingTrace> run_epochs(ModelParams params,
                                                 const TripleFactory& factory,
                                                 const TrainingConfig& config,
                                                 std::size_t first_epoch,
                                                 std::size_t num_epochs) {
  TrainingTrace trace;
  trace.epoch_mean_loss.reserve(num_epochs);
  const auto started = Clock::now();

  GradAccumulator acc;
  for (std::size_t e = 0; e < num_epochs; ++e) {
    const std::size_t epoch = first_epoch + e;
    Rng rng(config.seed + epoch);
    double epoch_loss = 0.0;
    std::size_t epoch_terms = 0;
    std::size_t batch_index = 0;
    for (const auto& batch : epoch_batches(factory, config.batch_size, rng)) {
      const NegativeBatch negs = sample_negatives(factory, batch, config.num_negatives, rng);
      acc.clear();
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const IdTriple& pos = batch[i];
        const double pos_score = score(params, pos.h, pos.r, pos.t);
        for (const IdTriple& neg : negs.negatives[i]) {
          const double neg_score = score(params, neg.h, neg.r, neg.t);
          const double loss = config.margin - pos_score + neg_score;
          if (loss > 0.0) {
            batch_loss += loss;
            acc.add(grad(params, pos.h, pos.r, pos.t), -1.0);
            acc.add(grad(params, neg.h, neg.r, neg.t), 1.0);
          }
          ++epoch_terms;
        }
      }
      if (!std::isfinite(batch_loss))
        throw Error(ErrorKind::divergence,
                    "divergence: non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_index));
      acc.apply(params, config.learning_rate);
      constrain(params);
      epoch_loss += batch_loss;
      ++batch_index;
    }
    if (!all_finite(params))
      throw Error(ErrorKind::divergence,
                  "divergence: non-finite parameters after epoch " + std::to_string(epoch));
    trace.epoch_mean_loss.push_back(epoch_terms > 0 ? epoch_loss / epoch_terms : 0.0);
  }

  trace.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return {std::move(params), std::move(trace)};
}

}  // namespace

void TrainingConfig::validate() const {
  if (dim < 1 || epochs < 1 || batch_size < 1 || num_negatives < 1 || eval_batch_size < 1)
    throw invalid_error("config counts must be >= 1");
  if (!(learning_rate > 0.0)) throw invalid_error("learning_rate must be > 0");
  if (!(margin >= 0.0)) throw invalid_error("margin must be >= 0");
}

std::pair<ModelParams, TrainingTrace> train(const TripleFactory& factory,
                                            const TrainingConfig& config) {
  config.validate();
  if (factory.triples.empty()) throw invalid_error("cannot train on an empty factory");
  Rng init_rng(config.seed);
  ModelParams params = init_params(config.model, factory.vocabulary.num_entities(),
                                   factory.vocabulary.num_relations(), config.dim, init_rng);
  params.transe_l1 = config.transe_l1;
  return run_epochs(std::move(params), factory, config, 0, config.epochs);
}

std::pair<ModelParams, TrainingTrace> resume(const ModelParams& params,
                                             const TrainingConfig& config,
                                             const TripleFactory& factory,
                                             std::size_t completed_epochs,
                                             std::size_t extra_epochs) {
  config.validate();
  if (factory.triples.empty()) throw invalid_error("cannot train on an empty factory");
  if (params.num_entities != factory.vocabulary.num_entities() ||
      params.num_relations != factory.vocabulary.num_relations())
    throw Error(ErrorKind::mismatch,
                "checkpoint vocabulary size does not match factory (entities " +
                    std::to_string(params.num_entities) + " vs " +
                    std::to_string(factory.vocabulary.num_entities()) + ", relations " +
                    std::to_string(params.num_relations) + " vs " +
                    std::to_string(factory.vocabulary.num_relations()) + ")");
  if (extra_epochs == 0) return {params, TrainingTrace{}};
  return run_epochs(params, factory, config, completed_epochs, extra_epochs);
}

}  // namespace kgealign
