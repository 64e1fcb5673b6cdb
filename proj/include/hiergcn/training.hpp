#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hiergcn/graph.hpp"
#include "hiergcn/interactions.hpp"
#include "hiergcn/model.hpp"
#include "hiergcn/rng.hpp"

namespace hiergcn {

enum class MaskRefresh { step, epoch };
enum class RegScope { batch, full };

struct TrainConfig {
  double learning_rate = 0.05;
  double reg_lambda = 1e-3;
  double keep_prob = 0.9;
  int layers = 3;
  int dim = 64;
  int epochs = 50;
  int batch_size = 1024;
  std::uint64_t seed = 42;
  MaskRefresh mask_refresh = MaskRefresh::step;
  // L2 scope per step: `batch` decays the embedding rows touched by the
  // batch plus every W_k; `full` decays all of Theta.
  RegScope reg_scope = RegScope::batch;
  MaskOptions mask_options;

  // Holdout metrics cadence (0 = never). Uses the set's test pairs.
  int eval_every = 0;
  // Early stop after this many evaluations without ndcg@10 improving
  // (0 = disabled; requires eval_every > 0).
  int patience = 0;

  // Written by train() when non-empty.
  std::string checkpoint_path;
  int checkpoint_every = 0;  // additionally every c epochs (suffix _epoch_c)
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double recall10 = -1.0;  // negative = not evaluated this epoch
  double ndcg10 = -1.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

// Pairwise ranking loss -ln sigma(r_ui - r_uj) + lambda * ||Theta||^2 with
// the full parameter norm. Computed through a stable softplus.
double bpr_loss(double r_ui, double r_uj, const ModelParams& params, double lambda);

double sigmoid(double x);
double softplus(double x);

// One pass of |train_pairs| sampled triplets in batches: fresh masks per
// step (or per epoch), forward, exact batch-mean gradient, plain SGD step.
// Deterministic for a fixed rng state. Throws NumericalError when the loss
// stops being finite.
EpochStats train_epoch(ModelParams& params, const NormalizedAdjacency& adj,
                       const InteractionSet& set, const TrainConfig& cfg, Rng& rng);

// Epoch loop with optional holdout metrics, early stopping and
// checkpointing.
TrainReport train(ModelParams& params, const NormalizedAdjacency& adj,
                  const InteractionSet& set, const TrainConfig& cfg);

// `epoch,loss,recall10,ndcg10,seconds`; metric cells are empty on epochs
// without a holdout evaluation.
void write_train_report_csv(const std::string& path, const TrainReport& report);

}  // namespace hiergcn
