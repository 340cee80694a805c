#pragma once

#include "agcnn/model.hpp"

namespace agcnn::ref {

/// Naive serial reference kernels. They exist for the test suites and the
/// benchmark: nothing in the library's production path calls them, so they
/// stay an independent check on the optimized implementations.

Tensor elementwise_product(const Tensor& a, const Tensor& b);
double sum_sequential(const Tensor& a);  // plain left-to-right accumulation

/// Eq.-by-eq sentence convolution: explicit loops over window rows, embedding
/// dimensions and channels, one g()+bias+activation per position.
Tensor sentence_conv(const Tensor& E, const Tensor& weights, double bias, const Activation& f);

/// Length-preserving attention convolution done the obvious way: materialize
/// the zero-padded copy, then run a valid convolution over it.
Tensor attention_conv(const Tensor& C, const Tensor& kernel);

Tensor gate(const Tensor& C, const Tensor& A, double bias, const Activation& f);

/// Unstabilized softmax e^z / sum(e^z); valid for small logits only.
Tensor softmax_direct(const Tensor& logits);

std::size_t argmax_linear_scan(std::span<const double> values);

/// Whole-network eval-mode forward assembled from the reference kernels.
Tensor model_forward(const AgcnnModel& model, std::span<const int> tokens);

}  // namespace agcnn::ref
