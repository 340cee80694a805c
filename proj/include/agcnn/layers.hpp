#pragma once

#include "agcnn/activations.hpp"
#include "agcnn/tensor.hpp"

namespace agcnn {

enum class Mode { Train, Eval };

/// Zero-padding split that makes a stride-1 valid convolution with window k
/// length-preserving: top = floor((k-1)/2), down = ceil((k-1)/2).
struct PaddingSpec {
  int top = 0;
  int down = 0;
};
PaddingSpec compute_padding(int k);

/// First-layer kernel: weights (h, d) for one channel or (h, d, ch) for
/// multi-channel input, one scalar bias, window h in words.
struct SentenceConvKernel {
  Tensor weights;
  double bias = 0.0;
  int window = 1;
};

/// Attention-layer kernel: weights (k,), one scalar bias (applied inside the
/// gate, not in the convolution), window k in features.
struct AttentionKernel {
  Tensor weights;
  double bias = 0.0;
  int window = 1;
};

struct DenseLayer {
  Tensor weights;  // (feature_dim, num_classes)
  Tensor bias;     // (num_classes,)
};

/// Window convolution over the sentence matrix: out[j] = f(sum(W * E[j:j+h]) + b)
/// for j = 0..n-h. E is (n, d) or (n, d, ch) matching the kernel weights.
/// When `preact` is non-null the pre-activation values are cached there for
/// the backward pass.
Tensor sentence_conv_forward(const Tensor& E, const SentenceConvKernel& kernel, const Activation& f,
                             Tensor* preact = nullptr);

struct SentenceConvGrads {
  Tensor weights;
  double bias = 0.0;
  Tensor input;        // dL/dE, same shape as E
  double prelu_slope = 0.0;
};
/// Backward of sentence_conv_forward for upstream gradient dL/dC.
/// `preact` is the cache captured by the forward call; missing -> rejected.
SentenceConvGrads sentence_conv_backward(const Tensor& grad_out, const Tensor& E,
                                         const SentenceConvKernel& kernel, const Activation& f,
                                         const Tensor& preact);

/// Length-preserving attention convolution: zero-pad C per compute_padding(k)
/// and slide the kernel. No bias and no activation here; both enter in the gate.
Tensor attention_weights(const Tensor& C, const AttentionKernel& kernel);

struct AttentionWeightsGrads {
  Tensor weights;
  Tensor input;  // dL/dC
};
AttentionWeightsGrads attention_weights_backward(const Tensor& grad_attention, const Tensor& C,
                                                 const AttentionKernel& kernel);

/// Gate: m[j] = C[j] * f(A[j] + bias).
Tensor attention_gate(const Tensor& C, const Tensor& A, double bias, const Activation& f);

struct AttentionGateGrads {
  Tensor c;            // gate-product path only; the attention-conv path into C
  Tensor a;            // is produced by attention_weights_backward
  double bias = 0.0;
  double prelu_slope = 0.0;
};
AttentionGateGrads attention_gate_backward(const Tensor& grad_gated, const Tensor& C, const Tensor& A,
                                           double bias, const Activation& f);

/// Per-element keep/scale factors recorded by a train-mode dropout pass.
/// Empty scale means the pass was an identity (eval mode or rate 0).
struct DropoutMask {
  std::vector<double> scale;
};

/// Inverted dropout: train mode zeroes each element with probability `rate`
/// and scales survivors by 1/(1-rate); eval mode is the identity.
Tensor dropout_forward(const Tensor& x, double rate, Mode mode, Rng* rng, DropoutMask* mask = nullptr);
Tensor dropout_backward(const Tensor& grad_out, const DropoutMask& mask);

/// logits = features . W + b; probabilities via max-subtracted softmax.
Tensor dense_softmax_forward(const Tensor& features, const DenseLayer& layer, Tensor* logits = nullptr);

struct DenseGrads {
  Tensor weights;
  Tensor bias;
  Tensor features;
};
/// Backward of the dense layer given dL/dlogits (the softmax+loss pair hands
/// that over in fused form).
DenseGrads dense_softmax_backward(const Tensor& grad_logits, const Tensor& features, const DenseLayer& layer);

/// Max-over-time pooling backward: route the incoming scalar gradient to the
/// recorded argmax position.
Tensor max_over_time_backward(double grad, std::size_t argmax, std::size_t length);

}  // namespace agcnn
