#pragma once

#include <span>
#include <vector>

#include "agcnn/model.hpp"

namespace agcnn {

struct TrainConfig {
  int batch_size = 50;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 100;
  int early_stop_patience = 10;
  double lr_decay_factor = 0.5;
  int lr_decay_patience = 5;
  double val_fraction = 0.1;
  std::uint64_t seed = 1;
  int threads = 0;  // <= 0: resolve from AGCNN_THREADS / hardware at train time
  void validate() const;
};

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor grad_logits;  // p - onehot(label), the fused softmax+NLL form
};
/// loss = -ln p[label]. Probabilities must be a valid softmax output.
CrossEntropyResult cross_entropy(const Tensor& probabilities, int label);

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};
/// One bias-corrected Adam update over a flat parameter block. `t` is the
/// 1-based timestep shared by every block of the same optimizer.
void adam_step(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, long t, double lr, const AdamHyper& hp);

/// Adam state mirroring a model's trainable parameters.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(const AgcnnModel& model, AdamHyper hp = {});
  /// Applies one update from batch gradients. Non-finite gradients abort with
  /// a diagnostic naming the parameter block.
  void step(AgcnnModel& model, ModelGradients& grads, double lr);
  long timestep() const { return t_; }

 private:
  AdamHyper hp_;
  ModelGradients m_, v_;
  long t_ = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double lr = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_acc = 0.0;
};

/// Mini-batch Adam training with early stopping and learning-rate decay.
/// Per-example forward/backward runs in parallel with read-only parameters;
/// gradients reduce serially in example order, so results are bit-identical
/// for every thread count. The model ends loaded with the best-validation
/// snapshot (ties to the earliest epoch).
TrainResult train(AgcnnModel& model, const EncodedDataset& train_set, const EncodedDataset& val_set,
                  const TrainConfig& config);

/// Fraction of predict() matches, eval mode.
double evaluate(const AgcnnModel& model, const EncodedDataset& test_set, int threads = 0);

/// Splits off val_fraction of `data` (seeded shuffle) into (train, val).
std::pair<EncodedDataset, EncodedDataset> split_validation(const EncodedDataset& data, double val_fraction,
                                                           std::uint64_t seed);

struct FoldReport {
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  std::vector<int> epochs;
  std::vector<double> seconds;
};

/// Seeded k-fold cross-validation: disjoint near-equal folds covering the
/// dataset exactly once; each fold serves once as the test split while
/// val_fraction of the remainder is held out for early stopping.
FoldReport cross_validate(const EncodedDataset& dataset, int folds, const AgcnnConfig& model_config,
                          const TrainConfig& train_config, const Vocabulary& vocab,
                          const EmbeddingTable* pretrained);

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochStats>& history);

}  // namespace agcnn
