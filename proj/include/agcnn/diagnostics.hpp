#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agcnn/model.hpp"
#include "agcnn/training.hpp"

namespace agcnn {

/// Forward-only fully connected probe for watching how an activation shapes
/// the layer-to-layer distribution of activations.
struct SimConfig {
  int hidden_layers = 10;
  int nodes_per_layer = 100;
  int batch = 100;
  double weight_std = 1.0;   // weights ~ Normal(0, weight_std^2)
  double bias_init = 0.1;
  std::vector<ActivationKind> kinds = {ActivationKind::NLReLU, ActivationKind::ReLU};
  std::uint64_t seed = 1;
};

struct LayerStats {
  int layer = 0;  // 1-based
  ActivationKind kind{};
  double mean = 0.0;
  double variance = 0.0;  // sample variance over batch * nodes activations
};

/// Feeds a Normal(0,1) batch through `hidden_layers` dense layers and records
/// mean/variance of each layer's post-activation values. The same seed gives
/// every activation kind identical weights and inputs, so per-layer variances
/// are directly comparable across kinds.
std::vector<LayerStats> run_heteroscedasticity_sim(const SimConfig& config);

/// CSV schema: layer,activation,mean,variance
void write_layer_stats_csv(const std::filesystem::path& path, const std::vector<LayerStats>& stats);

/// One exported stage: a (sampled feature maps) x (positions) matrix.
struct HeatmapMatrix {
  std::string stage;            // e.g. "h1_conv_pre", "h1_k3_attention", "h1_k3_gated"
  int window_h = 0;
  int window_k = 0;             // -1 for first-layer stages
  std::vector<int> map_indices; // which of the t1 feature maps each row is
  Tensor values;                // (rows, positions)
};

struct HeatmapBundle {
  std::vector<std::string> tokens;  // column labels (window start token)
  std::vector<HeatmapMatrix> stages;
};

/// Traced eval-mode forward over one sentence; for every first-layer window
/// exports pre-activation and post-activation feature maps plus, per
/// attention window, the gate maps f(A+b) and the gated maps m. A seeded
/// sample of `sample_count` feature maps is shared across stages. Writes one
/// CSV and one binary PGM per stage under out_dir.
HeatmapBundle export_attention_maps(const AgcnnModel& model, std::span<const int> tokens,
                                    const std::vector<std::string>& token_labels,
                                    const std::filesystem::path& out_dir, int sample_count = 10,
                                    std::uint64_t seed = 1);

/// 8-bit grayscale PGM (binary P5), min-max normalized; constant matrices
/// render as mid-gray 128.
void write_pgm(const std::filesystem::path& path, const Tensor& matrix);

struct SweepRow {
  std::string dataset;
  ActivationKind kind{};
  double accuracy = 0.0;
  int epochs = 0;
  double seconds = 0.0;
};

/// Trains one model per activation kind with identical seeds and data order
/// and reports test accuracy per kind. Runs are fully isolated, so the kind
/// order cannot affect any row.
std::vector<SweepRow> activation_sweep(const std::string& dataset_name, const EncodedDataset& train_set,
                                       const EncodedDataset& val_set, const EncodedDataset& test_set,
                                       const AgcnnConfig& model_config, const TrainConfig& train_config,
                                       const std::vector<ActivationKind>& kinds, const Vocabulary& vocab,
                                       const EmbeddingTable* pretrained);

/// CSV schema: dataset,activation,accuracy,epochs,seconds
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace agcnn
