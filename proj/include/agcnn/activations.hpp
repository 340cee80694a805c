#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "agcnn/tensor.hpp"

namespace agcnn {

enum class ActivationKind { NLReLU, ReLU, Softplus, Sigmoid, ELU, PReLU, LReLU, SELU };

/// Lower-case names used by the CLI and config files: nlrelu, relu,
/// softplus, sigmoid, elu, prelu, lrelu, selu.
std::optional<ActivationKind> activation_from_name(std::string_view name);
std::string_view activation_name(ActivationKind kind);
const std::vector<ActivationKind>& all_activation_kinds();

inline constexpr double kLReLUSlope = 0.01;
inline constexpr double kPReLUInitSlope = 0.25;
inline constexpr double kELUAlpha = 1.0;
// SELU constants to 10 decimal places so the self-normalization checks are stable.
inline constexpr double kSELULambda = 1.0507009873;
inline constexpr double kSELUAlpha = 1.6732632423;

/// f(x) = ln(x + 1) for x > 0, 0 otherwise.
double nlrelu_forward(double x);
/// f'(x) = 1/(x + 1) for x > 0, 0 otherwise (0 at the kink).
double nlrelu_backward(double x);

/// One activation function with its parameters. PReLU's slope is the only
/// learnable one; it is owned by the model and copied in here per call site.
struct Activation {
  ActivationKind kind = ActivationKind::NLReLU;
  double prelu_slope = kPReLUInitSlope;

  double operator()(double x) const;
  /// df/dx; at kinks the left-side value is used.
  double derivative(double x) const;
  /// df/d(prelu_slope); zero for every kind except PReLU.
  double slope_derivative(double x) const;

  Tensor apply(const Tensor& x) const;
  Tensor derivative(const Tensor& x) const;
};

}  // namespace agcnn
