#include "agcnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agcnn {

PaddingSpec compute_padding(int k) {
  if (k < 1) throw std::invalid_argument("compute_padding: window must be >= 1, got " + std::to_string(k));
  return {(k - 1) / 2, k / 2};  // floor and ceil of (k-1)/2
}

// E may be (n, d) or (n, d, ch); the kernel weights mirror that rank.
static void check_conv_shapes(const Tensor& E, const SentenceConvKernel& kernel) {
  if (E.ndim() != 2 && E.ndim() != 3)
    throw std::invalid_argument("sentence_conv: input must be rank 2 or 3, got " + E.shape_string());
  if (kernel.weights.ndim() != E.ndim())
    throw std::invalid_argument("sentence_conv: kernel rank " + kernel.weights.shape_string() +
                                " does not match input " + E.shape_string());
  const auto h = static_cast<std::size_t>(kernel.window);
  if (kernel.weights.dim(0) != h)
    throw std::invalid_argument("sentence_conv: kernel window disagrees with weight shape " +
                                kernel.weights.shape_string());
  if (kernel.weights.dim(1) != E.dim(1) || (E.ndim() == 3 && kernel.weights.dim(2) != E.dim(2)))
    throw std::invalid_argument("sentence_conv: kernel shape " + kernel.weights.shape_string() +
                                " does not match input " + E.shape_string());
  if (E.dim(0) < h)
    throw std::invalid_argument("sentence_conv: sentence length " + std::to_string(E.dim(0)) +
                                " shorter than window " + std::to_string(kernel.window));
}

Tensor sentence_conv_forward(const Tensor& E, const SentenceConvKernel& kernel, const Activation& f,
                             Tensor* preact) {
  check_conv_shapes(E, kernel);
  const std::size_t n = E.dim(0);
  const std::size_t h = static_cast<std::size_t>(kernel.window);
  const std::size_t width = E.size() / n;       // d or d*ch per sentence row
  const std::size_t out_len = n - h + 1;

  Tensor out({out_len});
  Tensor pre({out_len});
  const double* e = E.data().data();
  const double* w = kernel.weights.data().data();
  for (std::size_t j = 0; j < out_len; ++j) {
    double acc = 0.0;
    const double* window = e + j * width;
    for (std::size_t i = 0; i < h * width; ++i) acc += w[i] * window[i];
    pre[j] = acc + kernel.bias;
    out[j] = f(pre[j]);
  }
  if (preact) *preact = std::move(pre);
  return out;
}

SentenceConvGrads sentence_conv_backward(const Tensor& grad_out, const Tensor& E,
                                         const SentenceConvKernel& kernel, const Activation& f,
                                         const Tensor& preact) {
  check_conv_shapes(E, kernel);
  const std::size_t n = E.dim(0);
  const std::size_t h = static_cast<std::size_t>(kernel.window);
  const std::size_t width = E.size() / n;
  const std::size_t out_len = n - h + 1;
  if (preact.size() != out_len)
    throw std::invalid_argument("sentence_conv_backward: missing or stale forward cache");
  if (grad_out.size() != out_len)
    throw std::invalid_argument("sentence_conv_backward: gradient length " + grad_out.shape_string() +
                                " does not match output length " + std::to_string(out_len));

  SentenceConvGrads g;
  g.weights = Tensor(kernel.weights.shape());
  g.input = Tensor(E.shape());
  const double* e = E.data().data();
  const double* w = kernel.weights.data().data();
  double* gw = g.weights.data().data();
  double* ge = g.input.data().data();
  for (std::size_t j = 0; j < out_len; ++j) {
    const double ds = grad_out[j] * f.derivative(preact[j]);
    g.prelu_slope += grad_out[j] * f.slope_derivative(preact[j]);
    if (ds == 0.0) continue;
    g.bias += ds;
    const double* window = e + j * width;
    double* gwin = ge + j * width;
    for (std::size_t i = 0; i < h * width; ++i) {
      gw[i] += ds * window[i];
      gwin[i] += ds * w[i];
    }
  }
  return g;
}

Tensor attention_weights(const Tensor& C, const AttentionKernel& kernel) {
  const std::size_t k = static_cast<std::size_t>(kernel.window);
  if (kernel.weights.ndim() != 1 || kernel.weights.dim(0) != k)
    throw std::invalid_argument("attention_weights: kernel shape " + kernel.weights.shape_string() +
                                " disagrees with window " + std::to_string(kernel.window));
  if (C.ndim() != 1 || C.size() == 0)
    throw std::invalid_argument("attention_weights: feature map must be a non-empty vector");
  const PaddingSpec pad = compute_padding(kernel.window);
  const std::size_t len = C.size();
  Tensor out({len});
  const double* c = C.data().data();
  const double* v = kernel.weights.data().data();
  for (std::size_t j = 0; j < len; ++j) {
    double acc = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
      const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(j + u) - pad.top;
      if (i >= 0 && i < static_cast<std::ptrdiff_t>(len)) acc += v[u] * c[i];
    }
    out[j] = acc;
  }
  return out;
}

AttentionWeightsGrads attention_weights_backward(const Tensor& grad_attention, const Tensor& C,
                                                 const AttentionKernel& kernel) {
  if (grad_attention.size() != C.size())
    throw std::invalid_argument("attention_weights_backward: gradient shape " +
                                grad_attention.shape_string() + " does not match features " +
                                C.shape_string());
  const std::size_t k = static_cast<std::size_t>(kernel.window);
  const PaddingSpec pad = compute_padding(kernel.window);
  const std::size_t len = C.size();
  AttentionWeightsGrads g;
  g.weights = Tensor(kernel.weights.shape());
  g.input = Tensor(C.shape());
  const double* c = C.data().data();
  const double* v = kernel.weights.data().data();
  for (std::size_t j = 0; j < len; ++j) {
    const double da = grad_attention[j];
    if (da == 0.0) continue;
    for (std::size_t u = 0; u < k; ++u) {
      const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(j + u) - pad.top;
      if (i >= 0 && i < static_cast<std::ptrdiff_t>(len)) {
        g.weights[u] += da * c[i];
        g.input[static_cast<std::size_t>(i)] += da * v[u];
      }
    }
  }
  return g;
}

Tensor attention_gate(const Tensor& C, const Tensor& A, double bias, const Activation& f) {
  if (!C.same_shape(A))
    throw std::invalid_argument("attention_gate: shape mismatch " + C.shape_string() + " vs " +
                                A.shape_string());
  Tensor out(C.shape());
  for (std::size_t j = 0; j < C.size(); ++j) out[j] = C[j] * f(A[j] + bias);
  return out;
}

AttentionGateGrads attention_gate_backward(const Tensor& grad_gated, const Tensor& C, const Tensor& A,
                                           double bias, const Activation& f) {
  if (!C.same_shape(A) || !grad_gated.same_shape(C))
    throw std::invalid_argument("attention_gate_backward: shape mismatch " + grad_gated.shape_string() +
                                " vs " + C.shape_string() + " vs " + A.shape_string());
  AttentionGateGrads g;
  g.c = Tensor(C.shape());
  g.a = Tensor(C.shape());
  for (std::size_t j = 0; j < C.size(); ++j) {
    const double q = A[j] + bias;
    g.c[j] = grad_gated[j] * f(q);
    const double dq = grad_gated[j] * C[j] * f.derivative(q);
    g.a[j] = dq;
    g.bias += dq;
    g.prelu_slope += grad_gated[j] * C[j] * f.slope_derivative(q);
  }
  return g;
}

Tensor dropout_forward(const Tensor& x, double rate, Mode mode, Rng* rng, DropoutMask* mask) {
  if (rate < 0.0 || rate >= 1.0)
    throw std::invalid_argument("dropout: rate must be in [0, 1), got " + std::to_string(rate));
  if (mask) mask->scale.clear();
  if (mode == Mode::Eval || rate == 0.0) return x;
  if (!rng) throw std::invalid_argument("dropout: train mode with nonzero rate needs an rng");
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor out(x.shape());
  if (mask) mask->scale.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = rng->uniform01() < rate ? 0.0 : keep_scale;
    out[i] = x[i] * s;
    if (mask) mask->scale[i] = s;
  }
  return out;
}

Tensor dropout_backward(const Tensor& grad_out, const DropoutMask& mask) {
  if (mask.scale.empty()) return grad_out;
  if (mask.scale.size() != grad_out.size())
    throw std::invalid_argument("dropout_backward: mask length does not match gradient");
  Tensor g(grad_out.shape());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = grad_out[i] * mask.scale[i];
  return g;
}

Tensor dense_softmax_forward(const Tensor& features, const DenseLayer& layer, Tensor* logits_out) {
  if (layer.weights.ndim() != 2 || layer.bias.ndim() != 1 || layer.bias.dim(0) != layer.weights.dim(1))
    throw std::invalid_argument("dense_softmax: malformed layer shapes " + layer.weights.shape_string() +
                                ", " + layer.bias.shape_string());
  if (features.size() != layer.weights.dim(0))
    throw std::invalid_argument("dense_softmax: feature length " + std::to_string(features.size()) +
                                " does not match weights " + layer.weights.shape_string());
  const std::size_t classes = layer.weights.dim(1);
  Tensor logits({classes});
  for (std::size_t c = 0; c < classes; ++c) {
    double acc = layer.bias[c];
    for (std::size_t i = 0; i < features.size(); ++i) acc += features[i] * layer.weights(i, c);
    logits[c] = acc;
  }
  const double max_logit = *std::max_element(logits.data().begin(), logits.data().end());
  Tensor probs({classes});
  double denom = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    denom += probs[c];
  }
  for (std::size_t c = 0; c < classes; ++c) probs[c] /= denom;
  if (logits_out) *logits_out = std::move(logits);
  return probs;
}

DenseGrads dense_softmax_backward(const Tensor& grad_logits, const Tensor& features,
                                  const DenseLayer& layer) {
  if (grad_logits.size() != layer.weights.dim(1) || features.size() != layer.weights.dim(0))
    throw std::invalid_argument("dense_softmax_backward: shape mismatch");
  DenseGrads g;
  g.weights = Tensor(layer.weights.shape());
  g.bias = Tensor(layer.bias.shape());
  g.features = Tensor(features.shape());
  const std::size_t classes = layer.weights.dim(1);
  for (std::size_t c = 0; c < classes; ++c) g.bias[c] = grad_logits[c];
  for (std::size_t i = 0; i < features.size(); ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      g.weights(i, c) = features[i] * grad_logits[c];
      acc += layer.weights(i, c) * grad_logits[c];
    }
    g.features[i] = acc;
  }
  return g;
}

Tensor max_over_time_backward(double grad, std::size_t argmax, std::size_t length) {
  if (argmax >= length) throw std::invalid_argument("max_over_time_backward: argmax out of range");
  Tensor g({length});
  g[argmax] = grad;
  return g;
}

}  // namespace agcnn
