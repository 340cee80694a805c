#include "agcnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace agcnn {

int AgcnnConfig::feature_dim() const {
  return static_cast<int>(window_sizes_l1.size() * window_sizes_l2.size()) * kernels_per_window;
}

int AgcnnConfig::min_sentence_len() const {
  return *std::max_element(window_sizes_l1.begin(), window_sizes_l1.end());
}

void AgcnnConfig::validate() const {
  if (window_sizes_l1.empty()) throw std::invalid_argument("config: window_sizes_l1 must be non-empty");
  for (int h : window_sizes_l1)
    if (h < 1) throw std::invalid_argument("config: first-layer window must be >= 1, got " + std::to_string(h));
  if (window_sizes_l2.empty()) throw std::invalid_argument("config: window_sizes_l2 must be non-empty");
  for (int k : window_sizes_l2)
    if (k < 1) throw std::invalid_argument("config: attention window must be >= 1, got " + std::to_string(k));
  if (kernels_per_window < 1) throw std::invalid_argument("config: kernels_per_window must be >= 1");
  if (embedding_dim < 1) throw std::invalid_argument("config: embedding_dim must be >= 1");
  if (num_classes < 1) throw std::invalid_argument("config: num_classes must be >= 1");
  if (channels < 1 || channels > 3) throw std::invalid_argument("config: channels must be 1, 2 or 3");
  if (channel_trainable.size() != static_cast<std::size_t>(channels))
    throw std::invalid_argument("config: channel_trainable must list every channel");
  for (std::size_t i = 1; i < channel_trainable.size(); ++i)
    if (channel_trainable[i])
      throw std::invalid_argument("config: only channel 0 may be trainable");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0)
    throw std::invalid_argument("config: dropout_rate must be in [0, 1)");
}

std::size_t AgcnnModel::vocab_size() const {
  return embeddings.empty() ? 0 : embeddings[0].dim(0) - 1;
}

std::size_t AgcnnModel::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& e : embeddings) n += e.size();
  for (const auto& block : conv)
    for (const auto& k : block) n += k.weights.size() + 1;
  for (const auto& block : attention)
    for (const auto& k : block) n += k.weights.size() + 1;
  n += dense.weights.size() + dense.bias.size();
  if (config.activation == ActivationKind::PReLU) n += 2;
  return n;
}

AgcnnModel build_model(const AgcnnConfig& config, const Vocabulary& vocab, const EmbeddingTable* pretrained,
                       Rng& rng) {
  config.validate();
  if (pretrained && pretrained->dim != config.embedding_dim)
    throw std::invalid_argument("build_model: pretrained dimension " + std::to_string(pretrained->dim) +
                                " does not match configured embedding_dim " +
                                std::to_string(config.embedding_dim));
  AgcnnModel m;
  m.config = config;

  EmbeddingTable empty;
  empty.dim = config.embedding_dim;
  Tensor base = init_unknown_words(vocab, pretrained ? *pretrained : empty, rng);
  m.embeddings.assign(static_cast<std::size_t>(config.channels), base);

  const std::size_t d = static_cast<std::size_t>(config.embedding_dim);
  const std::size_t ch = static_cast<std::size_t>(config.channels);
  m.conv.resize(config.window_sizes_l1.size());
  for (std::size_t a = 0; a < config.window_sizes_l1.size(); ++a) {
    const int h = config.window_sizes_l1[a];
    const std::size_t fan_in = static_cast<std::size_t>(h) * d * ch;
    std::vector<std::size_t> wshape = ch == 1
                                          ? std::vector<std::size_t>{static_cast<std::size_t>(h), d}
                                          : std::vector<std::size_t>{static_cast<std::size_t>(h), d, ch};
    m.conv[a].reserve(static_cast<std::size_t>(config.kernels_per_window));
    for (int t = 0; t < config.kernels_per_window; ++t)
      m.conv[a].push_back({he_init(wshape, fan_in, rng), 0.0, h});
  }

  m.attention.resize(config.window_sizes_l1.size());
  for (std::size_t a = 0; a < config.window_sizes_l1.size(); ++a) {
    for (int k : config.window_sizes_l2)
      m.attention[a].push_back({he_init({static_cast<std::size_t>(k)}, static_cast<std::size_t>(k), rng),
                                0.0, k});
  }

  const std::size_t feat = static_cast<std::size_t>(config.feature_dim());
  const std::size_t classes = static_cast<std::size_t>(config.num_classes);
  m.dense.weights = xavier_init({feat, classes}, feat, classes, rng);
  m.dense.bias = Tensor({classes});
  return m;
}

// --- forward ---------------------------------------------------------------

static Tensor embed_tokens(const AgcnnModel& model, std::span<const int> tokens) {
  const std::size_t n = tokens.size();
  const std::size_t d = static_cast<std::size_t>(model.config.embedding_dim);
  const std::size_t ch = model.embeddings.size();
  const std::size_t rows = model.embeddings[0].dim(0);
  for (int t : tokens)
    if (t < 0 || static_cast<std::size_t>(t) >= rows)
      throw std::out_of_range("model_forward: token index " + std::to_string(t) +
                              " outside vocabulary of size " + std::to_string(rows - 1));
  if (ch == 1) {
    Tensor E({n, d});
    for (std::size_t i = 0; i < n; ++i) {
      auto src = model.embeddings[0].row(static_cast<std::size_t>(tokens[i]));
      std::copy(src.begin(), src.end(), E.row(i).begin());
    }
    return E;
  }
  Tensor E({n, d, ch});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ch; ++c) {
      auto src = model.embeddings[c].row(static_cast<std::size_t>(tokens[i]));
      for (std::size_t v = 0; v < d; ++v) E(i, v, c) = src[v];
    }
  return E;
}

Tensor model_forward(const AgcnnModel& model, std::span<const int> tokens, Mode mode, Rng* dropout_rng,
                     ForwardTape* tape) {
  const AgcnnConfig& cfg = model.config;
  if (tokens.size() < static_cast<std::size_t>(cfg.min_sentence_len()))
    throw std::invalid_argument("model_forward: sentence length " + std::to_string(tokens.size()) +
                                " shorter than the largest window " +
                                std::to_string(cfg.min_sentence_len()) + "; pad the batch first");
  ForwardTape local;
  ForwardTape& tp = tape ? *tape : local;
  tp.tokens.assign(tokens.begin(), tokens.end());
  tp.embedded = embed_tokens(model, tokens);

  const Activation f_conv = model.conv_activation();
  const Activation f_gate = model.gate_activation();
  const std::size_t t1 = static_cast<std::size_t>(cfg.kernels_per_window);
  const std::size_t nk = cfg.window_sizes_l2.size();

  Tensor features({static_cast<std::size_t>(cfg.feature_dim())});
  std::size_t fi = 0;
  tp.blocks.clear();
  tp.blocks.resize(cfg.window_sizes_l1.size());
  for (std::size_t a = 0; a < cfg.window_sizes_l1.size(); ++a) {
    ForwardTape::HBlock& blk = tp.blocks[a];
    blk.window = cfg.window_sizes_l1[a];
    blk.preact.resize(t1);
    blk.post.resize(t1);
    blk.attn.assign(nk, {});
    blk.gate.assign(nk, {});
    blk.gated.assign(nk, {});
    blk.argmax.assign(nk, {});
    for (std::size_t t = 0; t < t1; ++t)
      blk.post[t] = sentence_conv_forward(tp.embedded, model.conv[a][t], f_conv, &blk.preact[t]);
    const std::size_t len = blk.post[0].size();
    for (std::size_t b = 0; b < nk; ++b) {
      const AttentionKernel& ak = model.attention[a][b];
      blk.attn[b].resize(t1);
      blk.gate[b].resize(t1);
      blk.gated[b].resize(t1);
      blk.argmax[b].resize(t1);
      for (std::size_t t = 0; t < t1; ++t) {
        Tensor A = attention_weights(blk.post[t], ak);
        Tensor D({len});
        Tensor m({len});
        for (std::size_t j = 0; j < len; ++j) {
          D[j] = f_gate(A[j] + ak.bias);
          m[j] = blk.post[t][j] * D[j];
        }
        MaxOverTime mx = max_over_time(m);
        features[fi++] = mx.value;
        blk.attn[b][t] = std::move(A);
        blk.gate[b][t] = std::move(D);
        blk.gated[b][t] = std::move(m);
        blk.argmax[b][t] = mx.index;
      }
    }
  }

  tp.features = std::move(features);
  tp.dropped = dropout_forward(tp.features, cfg.dropout_rate, mode, dropout_rng, &tp.dropout);
  Tensor probs = dense_softmax_forward(tp.dropped, model.dense, &tp.logits);
  tp.probabilities = probs;
  return probs;
}

int argmax_index(const Tensor& probabilities) {
  if (probabilities.size() == 0) throw std::invalid_argument("argmax of empty tensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probabilities.size(); ++i)
    if (probabilities[i] > probabilities[best]) best = i;
  return static_cast<int>(best);
}

int predict(const AgcnnModel& model, std::span<const int> tokens) {
  return argmax_index(model_forward(model, tokens, Mode::Eval, nullptr));
}

// --- gradients ---------------------------------------------------------------

ModelGradients ModelGradients::zeros_like(const AgcnnModel& model) {
  ModelGradients g;
  if (model.config.channel_trainable[0]) g.embedding = Tensor(model.embeddings[0].shape());
  g.conv_w.resize(model.conv.size());
  g.conv_b.resize(model.conv.size());
  for (std::size_t a = 0; a < model.conv.size(); ++a) {
    g.conv_b[a].assign(model.conv[a].size(), 0.0);
    g.conv_w[a].reserve(model.conv[a].size());
    for (const auto& k : model.conv[a]) g.conv_w[a].emplace_back(k.weights.shape());
  }
  g.attn_w.resize(model.attention.size());
  g.attn_b.resize(model.attention.size());
  for (std::size_t a = 0; a < model.attention.size(); ++a) {
    g.attn_b[a].assign(model.attention[a].size(), 0.0);
    g.attn_w[a].reserve(model.attention[a].size());
    for (const auto& k : model.attention[a]) g.attn_w[a].emplace_back(k.weights.shape());
  }
  g.dense_w = Tensor(model.dense.weights.shape());
  g.dense_b = Tensor(model.dense.bias.shape());
  return g;
}

void ModelGradients::reset() {
  embedding.fill(0.0);
  for (auto& block : conv_w)
    for (auto& t : block) t.fill(0.0);
  for (auto& block : conv_b) std::fill(block.begin(), block.end(), 0.0);
  for (auto& block : attn_w)
    for (auto& t : block) t.fill(0.0);
  for (auto& block : attn_b) std::fill(block.begin(), block.end(), 0.0);
  dense_w.fill(0.0);
  dense_b.fill(0.0);
  prelu_conv = prelu_gate = 0.0;
}

static void axpy(Tensor& dst, const Tensor& src, double weight) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += weight * src[i];
}

void ModelGradients::accumulate(const ExampleGradients& g, double weight) {
  if (!embedding.empty()) {
    for (const auto& [tok, row] : g.embedding_rows) {
      auto dst = embedding.row(static_cast<std::size_t>(tok));
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += weight * row[j];
    }
  }
  for (std::size_t a = 0; a < conv_w.size(); ++a)
    for (std::size_t t = 0; t < conv_w[a].size(); ++t) {
      axpy(conv_w[a][t], g.conv_w[a][t], weight);
      conv_b[a][t] += weight * g.conv_b[a][t];
    }
  for (std::size_t a = 0; a < attn_w.size(); ++a)
    for (std::size_t b = 0; b < attn_w[a].size(); ++b) {
      axpy(attn_w[a][b], g.attn_w[a][b], weight);
      attn_b[a][b] += weight * g.attn_b[a][b];
    }
  axpy(dense_w, g.dense_w, weight);
  axpy(dense_b, g.dense_b, weight);
  prelu_conv += weight * g.prelu_conv;
  prelu_gate += weight * g.prelu_gate;
}

ExampleGradients model_backward(const AgcnnModel& model, const ForwardTape& tape, int label) {
  const AgcnnConfig& cfg = model.config;
  if (tape.probabilities.size() == 0 || tape.blocks.size() != cfg.window_sizes_l1.size())
    throw std::invalid_argument("model_backward: forward tape missing or incomplete");
  if (label < 0 || label >= cfg.num_classes)
    throw std::out_of_range("model_backward: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(cfg.num_classes) + ")");

  Tensor grad_logits(tape.probabilities.shape());
  for (std::size_t c = 0; c < grad_logits.size(); ++c)
    grad_logits[c] = tape.probabilities[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);

  DenseGrads dg = dense_softmax_backward(grad_logits, tape.dropped, model.dense);
  Tensor dfeat = dropout_backward(dg.features, tape.dropout);

  ExampleGradients g;
  g.dense_w = std::move(dg.weights);
  g.dense_b = std::move(dg.bias);
  g.conv_w.resize(model.conv.size());
  g.conv_b.resize(model.conv.size());
  g.attn_w.resize(model.attention.size());
  g.attn_b.resize(model.attention.size());

  const Activation f_conv = model.conv_activation();
  const Activation f_gate = model.gate_activation();
  const std::size_t t1 = static_cast<std::size_t>(cfg.kernels_per_window);
  const std::size_t nk = cfg.window_sizes_l2.size();

  Tensor dE(tape.embedded.shape());
  std::size_t fi = 0;
  for (std::size_t a = 0; a < tape.blocks.size(); ++a) {
    const ForwardTape::HBlock& blk = tape.blocks[a];
    const std::size_t len = blk.post[0].size();
    std::vector<Tensor> dC(t1, Tensor({len}));
    g.attn_w[a].reserve(nk);
    g.attn_b[a].assign(nk, 0.0);
    for (std::size_t b = 0; b < nk; ++b) {
      const AttentionKernel& ak = model.attention[a][b];
      Tensor vw(ak.weights.shape());
      for (std::size_t t = 0; t < t1; ++t) {
        Tensor dm = max_over_time_backward(dfeat[fi++], blk.argmax[b][t], len);
        AttentionGateGrads gg = attention_gate_backward(dm, blk.post[t], blk.attn[b][t], ak.bias, f_gate);
        g.attn_b[a][b] += gg.bias;
        g.prelu_gate += gg.prelu_slope;
        AttentionWeightsGrads aw = attention_weights_backward(gg.a, blk.post[t], ak);
        axpy(vw, aw.weights, 1.0);
        for (std::size_t j = 0; j < len; ++j) dC[t][j] += gg.c[j] + aw.input[j];
      }
      g.attn_w[a].push_back(std::move(vw));
    }
    g.conv_w[a].reserve(t1);
    g.conv_b[a].assign(t1, 0.0);
    for (std::size_t t = 0; t < t1; ++t) {
      SentenceConvGrads cg = sentence_conv_backward(dC[t], tape.embedded, model.conv[a][t], f_conv,
                                                    blk.preact[t]);
      g.conv_b[a][t] = cg.bias;
      g.prelu_conv += cg.prelu_slope;
      g.conv_w[a].push_back(std::move(cg.weights));
      // TODO: accumulate the conv input gradient in place; the per-kernel
      // temporary dominates allocation churn at full kernel counts.
      axpy(dE, cg.input, 1.0);
    }
  }

  // scatter into the trainable embedding channel; the padding row stays frozen
  if (cfg.channel_trainable[0]) {
    const std::size_t n = tape.tokens.size();
    const std::size_t d = static_cast<std::size_t>(cfg.embedding_dim);
    for (std::size_t i = 0; i < n; ++i) {
      const int tok = tape.tokens[i];
      if (tok == 0) continue;
      auto& row = g.embedding_rows[tok];
      if (row.empty()) row.assign(d, 0.0);
      for (std::size_t v = 0; v < d; ++v) row[v] += cfg.channels == 1 ? dE(i, v) : dE(i, v, 0);
    }
  }
  return g;
}

std::vector<ParamView> trainable_views(AgcnnModel& model, ModelGradients& grads) {
  std::vector<ParamView> views;
  if (model.config.channel_trainable[0]) {
    if (grads.embedding.size() != model.embeddings[0].size())
      throw std::invalid_argument("trainable_views: gradient layout does not match model");
    views.push_back({"embedding", model.embeddings[0].data(), grads.embedding.data()});
  }
  for (std::size_t a = 0; a < model.conv.size(); ++a) {
    const std::string hs = std::to_string(model.config.window_sizes_l1[a]);
    for (std::size_t t = 0; t < model.conv[a].size(); ++t) {
      std::string base = "conv[h=" + hs + "][" + std::to_string(t) + "]";
      views.push_back({base + ".weights", model.conv[a][t].weights.data(), grads.conv_w[a][t].data()});
      views.push_back({base + ".bias", {&model.conv[a][t].bias, 1}, {&grads.conv_b[a][t], 1}});
    }
  }
  for (std::size_t a = 0; a < model.attention.size(); ++a) {
    const std::string hs = std::to_string(model.config.window_sizes_l1[a]);
    for (std::size_t b = 0; b < model.attention[a].size(); ++b) {
      std::string base = "attention[h=" + hs + ",k=" + std::to_string(model.config.window_sizes_l2[b]) + "]";
      views.push_back({base + ".weights", model.attention[a][b].weights.data(), grads.attn_w[a][b].data()});
      views.push_back({base + ".bias", {&model.attention[a][b].bias, 1}, {&grads.attn_b[a][b], 1}});
    }
  }
  views.push_back({"dense.weights", model.dense.weights.data(), grads.dense_w.data()});
  views.push_back({"dense.bias", model.dense.bias.data(), grads.dense_b.data()});
  if (model.config.activation == ActivationKind::PReLU) {
    views.push_back({"prelu.conv_slope", {&model.prelu_conv_slope, 1}, {&grads.prelu_conv, 1}});
    views.push_back({"prelu.gate_slope", {&model.prelu_gate_slope, 1}, {&grads.prelu_gate, 1}});
  }
  return views;
}

// --- checkpoint io -----------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'A', 'G', 'C', 'N', 'N', '1'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::ofstream out;
  explicit Writer(const std::filesystem::path& path) : out(path, std::ios::binary) {
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  }
  void bytes(const void* p, std::size_t n) { out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u64(u);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void tensor(const Tensor& t) {
    u32(static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t i = 0; i < t.ndim(); ++i) u64(t.dim(i));
    for (double v : t.data()) f64(v);
  }
};

struct Reader {
  std::ifstream in;
  std::uint64_t offset = 0;
  std::filesystem::path path;
  explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary), path(p) {
    if (!in) throw std::runtime_error("cannot open checkpoint " + p.string());
  }
  void bytes(void* p, std::size_t n) {
    if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
      throw std::runtime_error(path.string() + ": checkpoint truncated at byte " + std::to_string(offset));
    offset += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double f64() {
    std::uint64_t u = u64();
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (n > (1u << 24)) throw std::runtime_error(path.string() + ": implausible string length in checkpoint");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  Tensor tensor() {
    std::uint32_t nd = u32();
    if (nd == 0 || nd > 4) throw std::runtime_error(path.string() + ": implausible tensor rank in checkpoint");
    std::vector<std::size_t> shape(nd);
    std::size_t total = 1;
    for (auto& d : shape) {
      d = u64();
      total *= d;
    }
    std::vector<double> data(total);
    for (double& v : data) v = f64();
    return Tensor(std::move(shape), std::move(data));
  }
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const AgcnnModel& m = ckpt.model;
  m.config.validate();
  if (ckpt.vocab_tokens.size() != m.embeddings[0].dim(0))
    throw std::invalid_argument("save_checkpoint: vocabulary size does not match embedding rows");
  if (ckpt.label_names.size() != static_cast<std::size_t>(m.config.num_classes))
    throw std::invalid_argument("save_checkpoint: label names do not match num_classes");

  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(m.config.window_sizes_l1.size()));
  for (int h : m.config.window_sizes_l1) w.u32(static_cast<std::uint32_t>(h));
  w.u32(static_cast<std::uint32_t>(m.config.kernels_per_window));
  w.u32(static_cast<std::uint32_t>(m.config.window_sizes_l2.size()));
  for (int k : m.config.window_sizes_l2) w.u32(static_cast<std::uint32_t>(k));
  w.u32(static_cast<std::uint32_t>(m.config.embedding_dim));
  w.u32(static_cast<std::uint32_t>(m.config.num_classes));
  w.u32(static_cast<std::uint32_t>(m.config.channels));
  for (bool t : m.config.channel_trainable) w.u8(t ? 1 : 0);
  w.u8(static_cast<std::uint8_t>(m.config.activation));
  w.f64(m.config.dropout_rate);
  w.u64(m.config.seed);

  Vocabulary vocab = Vocabulary::from_tokens(ckpt.vocab_tokens);
  w.u64(vocab.content_hash());
  w.u32(static_cast<std::uint32_t>(ckpt.vocab_tokens.size()));
  for (const auto& t : ckpt.vocab_tokens) w.str(t);
  w.u32(static_cast<std::uint32_t>(ckpt.label_names.size()));
  for (const auto& l : ckpt.label_names) w.str(l);

  for (const Tensor& e : m.embeddings) w.tensor(e);
  for (const auto& block : m.conv)
    for (const auto& k : block) {
      w.tensor(k.weights);
      w.f64(k.bias);
    }
  for (const auto& block : m.attention)
    for (const auto& k : block) {
      w.tensor(k.weights);
      w.f64(k.bias);
    }
  w.tensor(m.dense.weights);
  w.tensor(m.dense.bias);
  w.f64(m.prelu_conv_slope);
  w.f64(m.prelu_gate_slope);
  w.out.flush();
  if (!w.out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[6];
  r.bytes(magic, 6);
  if (std::memcmp(magic, kMagic, 6) != 0)
    throw std::runtime_error(path.string() + ": not an AGCNN1 checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw std::runtime_error(path.string() + ": unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  AgcnnConfig& cfg = ckpt.model.config;
  cfg.window_sizes_l1.resize(r.u32());
  for (int& h : cfg.window_sizes_l1) h = static_cast<int>(r.u32());
  cfg.kernels_per_window = static_cast<int>(r.u32());
  cfg.window_sizes_l2.resize(r.u32());
  for (int& k : cfg.window_sizes_l2) k = static_cast<int>(r.u32());
  cfg.embedding_dim = static_cast<int>(r.u32());
  cfg.num_classes = static_cast<int>(r.u32());
  cfg.channels = static_cast<int>(r.u32());
  cfg.channel_trainable.resize(static_cast<std::size_t>(cfg.channels));
  for (std::size_t i = 0; i < cfg.channel_trainable.size(); ++i) cfg.channel_trainable[i] = r.u8() != 0;
  const std::uint8_t act = r.u8();
  if (act > static_cast<std::uint8_t>(ActivationKind::SELU))
    throw std::runtime_error(path.string() + ": unknown activation id in checkpoint");
  cfg.activation = static_cast<ActivationKind>(act);
  cfg.dropout_rate = r.f64();
  cfg.seed = r.u64();
  cfg.validate();

  const std::uint64_t stored_hash = r.u64();
  const std::uint32_t vocab_count = r.u32();
  ckpt.vocab_tokens.reserve(vocab_count);
  for (std::uint32_t i = 0; i < vocab_count; ++i) ckpt.vocab_tokens.push_back(r.str());
  Vocabulary vocab = Vocabulary::from_tokens(ckpt.vocab_tokens);
  if (vocab.content_hash() != stored_hash)
    throw std::runtime_error(path.string() + ": vocabulary hash mismatch (file corrupt or vocab changed)");
  const std::uint32_t label_count = r.u32();
  for (std::uint32_t i = 0; i < label_count; ++i) ckpt.label_names.push_back(r.str());
  if (label_count != static_cast<std::uint32_t>(cfg.num_classes))
    throw std::runtime_error(path.string() + ": label block does not match num_classes");

  AgcnnModel& m = ckpt.model;
  m.embeddings.resize(static_cast<std::size_t>(cfg.channels));
  for (Tensor& e : m.embeddings) {
    e = r.tensor();
    if (e.ndim() != 2 || e.dim(0) != vocab_count || e.dim(1) != static_cast<std::size_t>(cfg.embedding_dim))
      throw std::runtime_error(path.string() + ": embedding tensor shape mismatch");
  }
  m.conv.resize(cfg.window_sizes_l1.size());
  for (std::size_t a = 0; a < m.conv.size(); ++a) {
    m.conv[a].resize(static_cast<std::size_t>(cfg.kernels_per_window));
    for (auto& k : m.conv[a]) {
      k.weights = r.tensor();
      k.bias = r.f64();
      k.window = cfg.window_sizes_l1[a];
    }
  }
  m.attention.resize(cfg.window_sizes_l1.size());
  for (std::size_t a = 0; a < m.attention.size(); ++a) {
    m.attention[a].resize(cfg.window_sizes_l2.size());
    for (std::size_t b = 0; b < m.attention[a].size(); ++b) {
      m.attention[a][b].weights = r.tensor();
      m.attention[a][b].bias = r.f64();
      m.attention[a][b].window = cfg.window_sizes_l2[b];
    }
  }
  m.dense.weights = r.tensor();
  m.dense.bias = r.tensor();
  m.prelu_conv_slope = r.f64();
  m.prelu_gate_slope = r.f64();
  if (m.dense.weights.ndim() != 2 || m.dense.weights.dim(0) != static_cast<std::size_t>(cfg.feature_dim()) ||
      m.dense.weights.dim(1) != static_cast<std::size_t>(cfg.num_classes))
    throw std::runtime_error(path.string() + ": dense tensor shape mismatch");
  return ckpt;
}

}  // namespace agcnn
