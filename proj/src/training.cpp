#include "agcnn/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "agcnn/parallel.hpp"

namespace agcnn {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be positive");
  if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
  if (lr_decay_factor <= 0.0 || lr_decay_factor > 1.0)
    throw std::invalid_argument("train: lr_decay_factor must be in (0, 1]");
  if (early_stop_patience < 1 || lr_decay_patience < 1)
    throw std::invalid_argument("train: patience values must be >= 1");
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw std::invalid_argument("train: val_fraction must be in (0, 1)");
}

CrossEntropyResult cross_entropy(const Tensor& probabilities, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probabilities.size())
    throw std::out_of_range("cross_entropy: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(probabilities.size()) + ")");
  CrossEntropyResult r;
  r.loss = -std::log(std::max(probabilities[static_cast<std::size_t>(label)], 1e-300));
  r.grad_logits = Tensor(probabilities.shape());
  for (std::size_t c = 0; c < probabilities.size(); ++c)
    r.grad_logits[c] = probabilities[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
  return r;
}

void adam_step(std::span<double> param, std::span<const double> grad, std::span<double> m,
               std::span<double> v, long t, double lr, const AdamHyper& hp) {
  if (param.size() != grad.size() || param.size() != m.size() || param.size() != v.size())
    throw std::invalid_argument("adam_step: mismatched buffer sizes");
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    m[i] = hp.beta1 * m[i] + (1.0 - hp.beta1) * g;
    v[i] = hp.beta2 * v[i] + (1.0 - hp.beta2) * g * g;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + hp.epsilon);
  }
}

AdamOptimizer::AdamOptimizer(const AgcnnModel& model, AdamHyper hp)
    : hp_(hp), m_(ModelGradients::zeros_like(model)), v_(ModelGradients::zeros_like(model)) {}

void AdamOptimizer::step(AgcnnModel& model, ModelGradients& grads, double lr) {
  ++t_;
  auto params = trainable_views(model, grads);
  auto ms = trainable_views(model, m_);
  auto vs = trainable_views(model, v_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (double g : params[i].grad)
      if (!std::isfinite(g))
        throw std::runtime_error("training aborted: non-finite gradient in " + params[i].name);
    adam_step(params[i].value, params[i].grad, ms[i].grad, vs[i].grad, t_, lr, hp_);
  }
}

// --- helpers -----------------------------------------------------------------

static void seeded_shuffle(std::vector<int>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i));
    std::swap(items[i - 1], items[std::min(j, i - 1)]);
  }
}

std::pair<EncodedDataset, EncodedDataset> split_validation(const EncodedDataset& data, double val_fraction,
                                                           std::uint64_t seed) {
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw std::invalid_argument("split_validation: fraction must be in (0, 1)");
  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng(seed).fork(0x5641);
  seeded_shuffle(idx, rng);
  std::size_t val_n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                                   val_fraction * static_cast<double>(data.size()))));
  val_n = std::min(val_n, data.size() - 1);
  EncodedDataset train_set, val_set;
  for (std::size_t i = 0; i < idx.size(); ++i)
    (i < val_n ? val_set : train_set).push_back(data[static_cast<std::size_t>(idx[i])]);
  return {std::move(train_set), std::move(val_set)};
}

double evaluate(const AgcnnModel& model, const EncodedDataset& test_set, int threads) {
  if (test_set.empty()) return 0.0;
  if (threads <= 0) threads = resolve_threads();
  const int min_len = model.config.min_sentence_len();
  std::vector<unsigned char> correct(test_set.size(), 0);
  parallel_for(static_cast<std::int64_t>(test_set.size()), threads, [&](std::int64_t i) {
    std::vector<int> padded = test_set[static_cast<std::size_t>(i)].tokens;
    if (padded.size() < static_cast<std::size_t>(min_len)) padded.resize(static_cast<std::size_t>(min_len), 0);
    correct[static_cast<std::size_t>(i)] =
        predict(model, padded) == test_set[static_cast<std::size_t>(i)].label ? 1 : 0;
  });
  std::size_t hits = 0;
  for (unsigned char c : correct) hits += c;
  return static_cast<double>(hits) / static_cast<double>(test_set.size());
}

// --- training loop -------------------------------------------------------------

TrainResult train(AgcnnModel& model, const EncodedDataset& train_set, const EncodedDataset& val_set,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.empty() || val_set.empty())
    throw std::invalid_argument("train: datasets must be non-empty");
  for (const auto& ex : train_set)
    if (ex.label < 0 || ex.label >= model.config.num_classes)
      throw std::out_of_range("train: label " + std::to_string(ex.label) + " outside [0, " +
                              std::to_string(model.config.num_classes) + ")");

  const int threads = config.threads > 0 ? config.threads : resolve_threads();
  const int min_len = model.config.min_sentence_len();
  const Rng shuffle_base = Rng(config.seed).fork(0x5348);
  const Rng dropout_base = Rng(config.seed).fork(0xD0);

  TrainResult result;
  AdamOptimizer opt(model, {config.beta1, config.beta2, config.epsilon});
  ModelGradients grads = ModelGradients::zeros_like(model);

  AgcnnModel best = model;
  double best_val = -1.0;
  int best_epoch = 0;
  int epochs_since_improve = 0;
  double lr = config.learning_rate;

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng shuffle_rng = shuffle_base.fork(static_cast<std::uint64_t>(epoch));
    seeded_shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t n = std::min(order.size() - start, static_cast<std::size_t>(config.batch_size));
      SentenceBatch batch = pad_batch(train_set, std::span<const int>(order).subspan(start, n), min_len);

      std::vector<ExampleGradients> ex_grads(n);
      std::vector<double> ex_loss(n, 0.0);
      std::vector<unsigned char> ex_hit(n, 0);
      parallel_for(static_cast<std::int64_t>(n), threads, [&](std::int64_t i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const int label = batch.labels[ui];
        Rng drop = dropout_base.fork(static_cast<std::uint64_t>(epoch) * train_set.size() +
                                     static_cast<std::uint64_t>(order[start + ui]));
        ForwardTape tape;
        Tensor probs = model_forward(model, batch.row(ui), Mode::Train, &drop, &tape);
        ex_loss[ui] = cross_entropy(probs, label).loss;
        ex_hit[ui] = argmax_index(probs) == label ? 1 : 0;
        ex_grads[ui] = model_backward(model, tape, label);
      });

      grads.reset();
      const double w = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        grads.accumulate(ex_grads[i], w);
        loss_sum += ex_loss[i];
        correct += ex_hit[i];
      }
      opt.step(model, grads, lr);
    }

    const double val_acc = evaluate(model, val_set, threads);
    const auto t1 = std::chrono::steady_clock::now();
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(train_set.size());
    st.train_acc = static_cast<double>(correct) / static_cast<double>(train_set.size());
    st.val_acc = val_acc;
    st.lr = lr;
    st.seconds = std::chrono::duration<double>(t1 - t0).count();
    result.history.push_back(st);

    if (val_acc > best_val) {
      best_val = val_acc;
      best_epoch = epoch;
      best = model;
      epochs_since_improve = 0;
    } else {
      ++epochs_since_improve;
      if (epochs_since_improve % config.lr_decay_patience == 0) lr *= config.lr_decay_factor;
      if (epochs_since_improve >= config.early_stop_patience) break;
    }
  }

  model = std::move(best);
  result.best_epoch = best_epoch;
  result.best_val_acc = best_val;
  return result;
}

FoldReport cross_validate(const EncodedDataset& dataset, int folds, const AgcnnConfig& model_config,
                          const TrainConfig& train_config, const Vocabulary& vocab,
                          const EmbeddingTable* pretrained) {
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (static_cast<std::size_t>(folds) > dataset.size())
    throw std::invalid_argument("cross_validate: more folds (" + std::to_string(folds) +
                                ") than examples (" + std::to_string(dataset.size()) + ")");

  std::vector<int> idx(dataset.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng = Rng(train_config.seed).fork(0xCF);
  seeded_shuffle(idx, rng);

  FoldReport report;
  const std::size_t n = dataset.size();
  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(folds);
    const std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(folds);
    EncodedDataset test_part, rest;
    for (std::size_t i = 0; i < n; ++i)
      (i >= lo && i < hi ? test_part : rest).push_back(dataset[static_cast<std::size_t>(idx[i])]);

    auto [train_part, val_part] =
        split_validation(rest, train_config.val_fraction, train_config.seed + static_cast<std::uint64_t>(f));

    Rng model_rng(model_config.seed + static_cast<std::uint64_t>(f));
    AgcnnModel model = build_model(model_config, vocab, pretrained, model_rng);
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult tr = train(model, train_part, val_part, train_config);
    const auto t1 = std::chrono::steady_clock::now();

    report.fold_accuracy.push_back(evaluate(model, test_part, train_config.threads));
    report.epochs.push_back(static_cast<int>(tr.history.size()));
    report.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  double sum = 0.0;
  for (double a : report.fold_accuracy) sum += a;
  report.mean_accuracy = sum / static_cast<double>(report.fold_accuracy.size());
  return report;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,train_loss,train_acc,val_acc,lr,seconds\n";
  out.precision(17);
  for (const auto& st : history)
    out << st.epoch << ',' << st.train_loss << ',' << st.train_acc << ',' << st.val_acc << ',' << st.lr
        << ',' << st.seconds << '\n';
}

}  // namespace agcnn
