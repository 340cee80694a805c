#include "agcnn/activations.hpp"

#include <cmath>
#include <stdexcept>

namespace agcnn {

std::optional<ActivationKind> activation_from_name(std::string_view name) {
  if (name == "nlrelu") return ActivationKind::NLReLU;
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "softplus") return ActivationKind::Softplus;
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "elu") return ActivationKind::ELU;
  if (name == "prelu") return ActivationKind::PReLU;
  if (name == "lrelu") return ActivationKind::LReLU;
  if (name == "selu") return ActivationKind::SELU;
  return std::nullopt;
}

std::string_view activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::NLReLU: return "nlrelu";
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::ELU: return "elu";
    case ActivationKind::PReLU: return "prelu";
    case ActivationKind::LReLU: return "lrelu";
    case ActivationKind::SELU: return "selu";
  }
  throw std::invalid_argument("unknown activation kind");
}

const std::vector<ActivationKind>& all_activation_kinds() {
  static const std::vector<ActivationKind> kinds = {
      ActivationKind::NLReLU, ActivationKind::ReLU,  ActivationKind::Softplus, ActivationKind::Sigmoid,
      ActivationKind::ELU,    ActivationKind::PReLU, ActivationKind::LReLU,    ActivationKind::SELU,
  };
  return kinds;
}

double nlrelu_forward(double x) { return x > 0.0 ? std::log1p(x) : 0.0; }

double nlrelu_backward(double x) { return x > 0.0 ? 1.0 / (x + 1.0) : 0.0; }

static double softplus(double x) {
  // ln(1 + e^x) without overflow on either tail.
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

static double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double Activation::operator()(double x) const {
  switch (kind) {
    case ActivationKind::NLReLU: return nlrelu_forward(x);
    case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
    case ActivationKind::Softplus: return softplus(x);
    case ActivationKind::Sigmoid: return sigmoid(x);
    case ActivationKind::ELU: return x > 0.0 ? x : kELUAlpha * std::expm1(x);
    case ActivationKind::PReLU: return x > 0.0 ? x : prelu_slope * x;
    case ActivationKind::LReLU: return x > 0.0 ? x : kLReLUSlope * x;
    case ActivationKind::SELU: return x > 0.0 ? kSELULambda * x : kSELULambda * kSELUAlpha * std::expm1(x);
  }
  throw std::invalid_argument("unknown activation kind");
}

double Activation::derivative(double x) const {
  switch (kind) {
    case ActivationKind::NLReLU: return nlrelu_backward(x);
    case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Softplus: return sigmoid(x);
    case ActivationKind::Sigmoid: {
      double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case ActivationKind::ELU: return x > 0.0 ? 1.0 : kELUAlpha * std::exp(x);
    case ActivationKind::PReLU: return x > 0.0 ? 1.0 : prelu_slope;
    case ActivationKind::LReLU: return x > 0.0 ? 1.0 : kLReLUSlope;
    case ActivationKind::SELU: return x > 0.0 ? kSELULambda : kSELULambda * kSELUAlpha * std::exp(x);
  }
  throw std::invalid_argument("unknown activation kind");
}

double Activation::slope_derivative(double x) const {
  if (kind != ActivationKind::PReLU) return 0.0;
  return x > 0.0 ? 0.0 : x;
}

Tensor Activation::apply(const Tensor& x) const {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (*this)(x[i]);
  return out;
}

Tensor Activation::derivative(const Tensor& x) const {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = derivative(x[i]);
  return out;
}

}  // namespace agcnn
