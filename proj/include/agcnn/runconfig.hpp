#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "agcnn/model.hpp"
#include "agcnn/training.hpp"

namespace agcnn {

/// Everything a CLI run needs: model settings, training settings, paths and
/// the model-variant name. Defaults are the published full-scale settings
/// (h = 1..5, 100 kernels per window, k = 1,3,5, d = 300, dropout 0.5,
/// batch 50).
struct RunConfig {
  // model
  std::vector<int> window_sizes = {1, 2, 3, 4, 5};
  int kernels_per_window = 100;
  std::vector<int> attention_windows = {1, 3, 5};
  int embedding_dim = 300;
  std::string variant = "rand";  // rand | static | non-static | multichannel-2 | multichannel-3
  std::string activation = "nlrelu";
  double dropout = 0.5;
  std::uint64_t seed = 1;
  // training
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
  int folds = 10;
  // paths
  std::string dataset;
  std::string test_dataset;
  std::string val_dataset;
  std::string embeddings;
  std::string embeddings_format = "binary";  // binary | text
  std::string checkpoint;
  std::string out_dir = "agcnn_out";
  // diagnostics
  int sim_layers = 10;
  int sim_nodes = 100;
  int sim_batch = 100;
  double weight_std = 1.0;
  double sim_bias = 0.1;
  std::string kinds;  // comma list for sweep/simulate; empty = all eight
  std::string text;   // predict / visualize input sentence
  int heatmap_samples = 10;

  void validate() const;
  int channels() const;
  std::vector<bool> channel_trainability() const;
  bool needs_pretrained() const;
  AgcnnConfig model_config(int num_classes) const;
  TrainConfig train_config() const;
  std::vector<ActivationKind> kind_list() const;  // parsed `kinds`, or all eight
};

/// Applies `key = value` lines onto `config`. '#' starts a comment. Unknown
/// keys and malformed values are rejected naming the key and line.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Single key/value assignment (used for both file lines and flag overrides).
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value,
                        const std::string& where);

/// key = value image of the whole config; parseable by apply_config_file.
std::string render_config(const RunConfig& config, const std::string& subcommand);

/// Manifest = rendered config + one "# artifact <fnv1a64-hex> <name>" line per
/// written file. Feeding the manifest back through --config replays the run.
void write_manifest(const std::filesystem::path& out_dir, const std::string& subcommand,
                    const RunConfig& config, const std::vector<std::filesystem::path>& artifacts);

}  // namespace agcnn
