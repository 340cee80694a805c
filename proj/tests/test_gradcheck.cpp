#include <doctest.h>

#include <cmath>

#include "agcnn/model.hpp"
#include "agcnn/training.hpp"
#include "test_util.hpp"

using namespace agcnn;

namespace {

double model_loss(const AgcnnModel& model, std::span<const int> tokens, int label) {
  Tensor p = model_forward(model, tokens, Mode::Eval, nullptr);
  return cross_entropy(p, label).loss;
}

struct CheckStats {
  double max_rel = 0.0;
  int checked = 0;
};

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < 1e-8) return 0.0;  // both effectively zero
  return std::abs(a - b) / scale;
}

/// Finite-difference check of every trainable parameter (embedding rows are
/// the input gradient: the sentence enters the network through them).
CheckStats check_all_gradients(AgcnnModel& model, std::span<const int> tokens, int label,
                               double tolerance) {
  ForwardTape tape;
  model_forward(model, tokens, Mode::Eval, nullptr, &tape);
  ExampleGradients eg = model_backward(model, tape, label);
  ModelGradients grads = ModelGradients::zeros_like(model);
  grads.accumulate(eg, 1.0);

  const double eps = 1e-5;
  CheckStats stats;
  auto views = trainable_views(model, grads);
  for (auto& view : views) {
    for (std::size_t i = 0; i < view.value.size(); ++i) {
      const double orig = view.value[i];
      view.value[i] = orig + eps;
      const double lp = model_loss(model, tokens, label);
      view.value[i] = orig - eps;
      const double lm = model_loss(model, tokens, label);
      view.value[i] = orig;
      const double fd = (lp - lm) / (2 * eps);
      const double re = rel_err(view.grad[i], fd);
      stats.max_rel = std::max(stats.max_rel, re);
      ++stats.checked;
      if (re > tolerance) {
        CAPTURE(view.name);
        CAPTURE(i);
        CAPTURE(view.grad[i]);
        CAPTURE(fd);
        CHECK(re <= tolerance);
      }
    }
  }
  return stats;
}

}  // namespace

TEST_CASE("micro-model gradients match finite differences (demo dimensions)") {
  AgcnnConfig cfg = testutil::micro_config(4, 0.0);
  Vocabulary vocab = Vocabulary::placeholder(7);
  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
  std::vector<int> sentence = {1, 2, 3, 4, 5, 6, 7};  // n = 7
  CheckStats st = check_all_gradients(model, sentence, 1, 1e-4);
  CHECK(st.checked == static_cast<int>(model.parameter_count()));
  CHECK(st.max_rel <= 1e-4);
}

TEST_CASE("gradcheck holds for every activation kind on a tiny model") {
  for (ActivationKind kind : all_activation_kinds()) {
    CAPTURE(activation_name(kind));
    AgcnnConfig cfg;
    cfg.window_sizes_l1 = {2};
    cfg.kernels_per_window = 2;
    cfg.window_sizes_l2 = {3};
    cfg.embedding_dim = 3;
    cfg.num_classes = 2;
    cfg.dropout_rate = 0.0;
    cfg.activation = kind;
    cfg.seed = 17;
    Vocabulary vocab = Vocabulary::placeholder(5);
    Rng rng(cfg.seed);
    AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
    std::vector<int> sentence = {1, 2, 3, 4};
    CheckStats st = check_all_gradients(model, sentence, 0, 2e-4);
    CHECK(st.max_rel <= 2e-4);
  }
}

TEST_CASE("gradcheck covers the single-kernel micro case with uneven windows") {
  AgcnnConfig cfg;
  cfg.window_sizes_l1 = {2};
  cfg.kernels_per_window = 1;
  cfg.window_sizes_l2 = {3};
  cfg.embedding_dim = 2;
  cfg.num_classes = 2;
  cfg.dropout_rate = 0.0;
  cfg.seed = 5;
  Vocabulary vocab = Vocabulary::placeholder(4);
  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
  std::vector<int> sentence = {1, 2, 3, 4};  // n = 4, d = 2, h = 2, k = 3
  CheckStats st = check_all_gradients(model, sentence, 1, 1e-4);
  CHECK(st.max_rel <= 1e-4);
}

TEST_CASE("gradcheck holds when the attention window exceeds the feature map") {
  AgcnnConfig cfg;
  cfg.window_sizes_l1 = {3};
  cfg.kernels_per_window = 2;
  cfg.window_sizes_l2 = {5};  // post-conv length is 2, so most taps hit padding
  cfg.embedding_dim = 3;
  cfg.num_classes = 2;
  cfg.dropout_rate = 0.0;
  cfg.seed = 21;
  Vocabulary vocab = Vocabulary::placeholder(4);
  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
  std::vector<int> sentence = {1, 2, 3, 4};
  CheckStats st = check_all_gradients(model, sentence, 0, 1e-4);
  CHECK(st.max_rel <= 1e-4);
}

TEST_CASE("gradcheck passes on a multichannel model (static channels get no grads)") {
  AgcnnConfig cfg;
  cfg.window_sizes_l1 = {2, 3};
  cfg.kernels_per_window = 2;
  cfg.window_sizes_l2 = {1, 3};
  cfg.embedding_dim = 3;
  cfg.num_classes = 2;
  cfg.channels = 2;
  cfg.channel_trainable = {true, false};
  cfg.dropout_rate = 0.0;
  cfg.seed = 29;
  Vocabulary vocab = Vocabulary::placeholder(6);
  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
  // make the channels differ so the check is not trivially symmetric
  for (double& v : model.embeddings[1].data()) v *= 0.5;
  std::vector<int> sentence = {1, 2, 3, 4, 5};
  CheckStats st = check_all_gradients(model, sentence, 0, 1e-4);
  CHECK(st.max_rel <= 1e-4);
}

TEST_CASE("zero upstream means zero parameter gradients at the model level") {
  // with a uniform target equal to the prediction, grad_logits == 0
  AgcnnConfig cfg = testutil::micro_config(3, 0.0);
  Vocabulary vocab = Vocabulary::placeholder(5);
  Rng rng(3);
  AgcnnModel model = build_model(cfg, vocab, nullptr, rng);
  // zero dense layer makes probabilities exactly uniform
  model.dense.weights.fill(0.0);
  model.dense.bias.fill(0.0);
  std::vector<int> sentence = {1, 2, 3, 4, 5};
  ForwardTape tape;
  Tensor p = model_forward(model, sentence, Mode::Eval, nullptr, &tape);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  ExampleGradients eg = model_backward(model, tape, 0);
  // dense weight gradient is feature * (p - onehot); p-onehot = (-.5, .5)
  // everything upstream of the dense layer receives exactly zero because the
  // dense weights are zero.
  for (const auto& block : eg.conv_w)
    for (const auto& t : block)
      for (double v : t.data()) CHECK(v == 0.0);
  for (const auto& [tok, row] : eg.embedding_rows)
    for (double v : row) CHECK(v == 0.0);
}
