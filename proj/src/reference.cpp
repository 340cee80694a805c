#include "agcnn/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace agcnn::ref {

Tensor elementwise_product(const Tensor& a, const Tensor& b) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

double sum_sequential(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return s;
}

Tensor sentence_conv(const Tensor& E, const Tensor& weights, double bias, const Activation& f) {
  const std::size_t n = E.dim(0);
  const std::size_t d = E.dim(1);
  const std::size_t ch = E.ndim() == 3 ? E.dim(2) : 1;
  const std::size_t h = weights.dim(0);
  if (n < h) throw std::invalid_argument("ref::sentence_conv: sentence shorter than window");
  Tensor out({n - h + 1});
  for (std::size_t j = 0; j + h <= n; ++j) {
    double acc = 0.0;
    for (std::size_t u = 0; u < h; ++u)
      for (std::size_t v = 0; v < d; ++v)
        for (std::size_t c = 0; c < ch; ++c) {
          const double e = E.ndim() == 3 ? E(j + u, v, c) : E(j + u, v);
          const double w = weights.ndim() == 3 ? weights(u, v, c) : weights(u, v);
          acc += w * e;
        }
    out[j] = f(acc + bias);
  }
  return out;
}

Tensor attention_conv(const Tensor& C, const Tensor& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int top = (k - 1) / 2;
  const int down = k / 2;
  const int len = static_cast<int>(C.size());
  std::vector<double> padded(static_cast<std::size_t>(top + len + down), 0.0);
  for (int i = 0; i < len; ++i) padded[static_cast<std::size_t>(top + i)] = C[static_cast<std::size_t>(i)];
  Tensor out({static_cast<std::size_t>(len)});
  for (int j = 0; j < len; ++j) {
    double acc = 0.0;
    for (int u = 0; u < k; ++u) acc += kernel[static_cast<std::size_t>(u)] * padded[static_cast<std::size_t>(j + u)];
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

Tensor gate(const Tensor& C, const Tensor& A, double bias, const Activation& f) {
  Tensor out(C.shape());
  for (std::size_t j = 0; j < C.size(); ++j) out[j] = C[j] * f(A[j] + bias);
  return out;
}

Tensor softmax_direct(const Tensor& logits) {
  Tensor out(logits.shape());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i]);
    denom += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= denom;
  return out;
}

std::size_t argmax_linear_scan(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

Tensor model_forward(const AgcnnModel& model, std::span<const int> tokens) {
  const AgcnnConfig& cfg = model.config;
  const std::size_t n = tokens.size();
  const std::size_t d = static_cast<std::size_t>(cfg.embedding_dim);
  const std::size_t ch = static_cast<std::size_t>(cfg.channels);

  Tensor E = ch == 1 ? Tensor({n, d}) : Tensor({n, d, ch});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t v = 0; v < d; ++v)
      for (std::size_t c = 0; c < ch; ++c) {
        const double x = model.embeddings[c](static_cast<std::size_t>(tokens[i]), v);
        if (ch == 1)
          E(i, v) = x;
        else
          E(i, v, c) = x;
      }

  const Activation f_conv = model.conv_activation();
  const Activation f_gate = model.gate_activation();
  std::vector<double> features;
  for (std::size_t a = 0; a < cfg.window_sizes_l1.size(); ++a) {
    std::vector<Tensor> maps;
    for (const auto& kernel : model.conv[a])
      maps.push_back(sentence_conv(E, kernel.weights, kernel.bias, f_conv));
    for (std::size_t b = 0; b < cfg.window_sizes_l2.size(); ++b) {
      const AttentionKernel& ak = model.attention[a][b];
      for (const Tensor& C : maps) {
        Tensor A = attention_conv(C, ak.weights);
        Tensor m = gate(C, A, ak.bias, f_gate);
        features.push_back(m[argmax_linear_scan(m.data())]);
      }
    }
  }

  Tensor logits({static_cast<std::size_t>(cfg.num_classes)});
  for (std::size_t c = 0; c < logits.size(); ++c) {
    double acc = model.dense.bias[c];
    for (std::size_t i = 0; i < features.size(); ++i) acc += features[i] * model.dense.weights(i, c);
    logits[c] = acc;
  }
  return softmax_direct(logits);
}

}  // namespace agcnn::ref
