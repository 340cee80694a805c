#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agcnn/data.hpp"
#include "agcnn/layers.hpp"

namespace agcnn {

struct AgcnnConfig {
  std::vector<int> window_sizes_l1 = {1, 2, 3, 4, 5};  // h values
  int kernels_per_window = 100;                        // t1
  std::vector<int> window_sizes_l2 = {1, 3, 5};        // k values
  int embedding_dim = 300;                             // d
  int num_classes = 2;                                 // c
  int channels = 1;
  std::vector<bool> channel_trainable = {true};
  ActivationKind activation = ActivationKind::NLReLU;
  double dropout_rate = 0.5;
  std::uint64_t seed = 1;

  int feature_dim() const;        // |l1| * |l2| * t1, the penultimate width
  int min_sentence_len() const;   // max h; shorter inputs must be padded first
  void validate() const;
};

/// All learned parameters. Feature ordering everywhere (concatenation, dense
/// layer, checkpoints) is (h index, k index, kernel index), h and k in config
/// list order.
struct AgcnnModel {
  AgcnnConfig config;
  std::vector<Tensor> embeddings;                       // per channel, (|V|+1, d)
  std::vector<std::vector<SentenceConvKernel>> conv;    // [h index][t]
  std::vector<std::vector<AttentionKernel>> attention;  // [h index][k index], shared over the t1 maps
  DenseLayer dense;
  double prelu_conv_slope = kPReLUInitSlope;
  double prelu_gate_slope = kPReLUInitSlope;

  std::size_t vocab_size() const;  // |V| (padding row excluded)
  std::size_t parameter_count() const;
  Activation conv_activation() const { return {config.activation, prelu_conv_slope}; }
  Activation gate_activation() const { return {config.activation, prelu_gate_slope}; }
};

/// Builds and initializes a model: conv/attention kernels He-initialized
/// (fan_in h*d*ch and k), dense layer Xavier-initialized, biases zero,
/// embeddings from the pretrained table with unknown rows per
/// init_unknown_words (pass nullptr for the fully random variant).
AgcnnModel build_model(const AgcnnConfig& config, const Vocabulary& vocab, const EmbeddingTable* pretrained,
                       Rng& rng);

/// Every intermediate needed by the backward pass and the visualizer.
struct ForwardTape {
  std::vector<int> tokens;
  Tensor embedded;  // (n, d) for one channel, (n, d, ch) for multichannel input
  struct HBlock {
    int window = 0;
    std::vector<Tensor> preact;               // per kernel t: (L,)
    std::vector<Tensor> post;                 // C
    std::vector<std::vector<Tensor>> attn;    // [k index][t]: A
    std::vector<std::vector<Tensor>> gate;    // [k index][t]: f(A + b)
    std::vector<std::vector<Tensor>> gated;   // [k index][t]: m
    std::vector<std::vector<std::size_t>> argmax;  // [k index][t]
  };
  std::vector<HBlock> blocks;
  Tensor features;   // concatenated pooled values, pre-dropout
  DropoutMask dropout;
  Tensor dropped;
  Tensor logits;
  Tensor probabilities;
};

/// Runs the network on one padded sentence. `dropout_rng` is only consumed in
/// train mode with a nonzero dropout rate. When `tape` is non-null all
/// intermediates are captured (required for model_backward and the
/// visualizer).
Tensor model_forward(const AgcnnModel& model, std::span<const int> tokens, Mode mode, Rng* dropout_rng,
                     ForwardTape* tape = nullptr);

/// Argmax of eval-mode probabilities, ties to the smallest index.
int predict(const AgcnnModel& model, std::span<const int> tokens);
int argmax_index(const Tensor& probabilities);

/// Gradients of one example's cross-entropy loss. The embedding gradient is
/// kept sparse (row per distinct token of the trainable channel).
struct ExampleGradients {
  std::map<int, std::vector<double>> embedding_rows;
  std::vector<std::vector<Tensor>> conv_w;
  std::vector<std::vector<double>> conv_b;
  std::vector<std::vector<Tensor>> attn_w;
  std::vector<std::vector<double>> attn_b;
  Tensor dense_w, dense_b;
  double prelu_conv = 0.0, prelu_gate = 0.0;
};

/// Dense batch-level gradients mirroring the model parameters.
struct ModelGradients {
  Tensor embedding;  // trainable channel only; empty when none is trainable
  std::vector<std::vector<Tensor>> conv_w;
  std::vector<std::vector<double>> conv_b;
  std::vector<std::vector<Tensor>> attn_w;
  std::vector<std::vector<double>> attn_b;
  Tensor dense_w, dense_b;
  double prelu_conv = 0.0, prelu_gate = 0.0;

  static ModelGradients zeros_like(const AgcnnModel& model);
  void reset();
  /// Adds `weight * g` in deterministic order; embedding rows merge by index.
  void accumulate(const ExampleGradients& g, double weight);
};

ExampleGradients model_backward(const AgcnnModel& model, const ForwardTape& tape, int label);

/// Uniform view over one trainable parameter block and its gradient.
struct ParamView {
  std::string name;
  std::span<double> value;
  std::span<double> grad;
};
/// Trainable blocks in the fixed documented order: embedding (if trainable),
/// conv kernels, attention kernels, dense, PReLU slopes (if active). The
/// gradients object must have been built by ModelGradients::zeros_like.
std::vector<ParamView> trainable_views(AgcnnModel& model, ModelGradients& grads);

// --- persistence -----------------------------------------------------------

/// Model plus the vocabulary and label names it was trained with; what the
/// checkpoint file stores so evaluation and prediction are self-contained.
struct Checkpoint {
  AgcnnModel model;
  std::vector<std::string> vocab_tokens;  // includes the leading <pad>
  std::vector<std::string> label_names;
};

/// Little-endian binary, magic "AGCNN1": format version, config block, vocab
/// content hash, vocabulary, label names, then parameter tensors in the
/// documented fixed order. Round-trips bit-exactly.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace agcnn
