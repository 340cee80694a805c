#include <doctest.h>

#include <cmath>

#include "agcnn/activations.hpp"
#include "agcnn/tensor.hpp"

using namespace agcnn;

static double central_diff(const Activation& f, double x, double eps = 1e-6) {
  return (f(x + eps) - f(x - eps)) / (2.0 * eps);
}

TEST_CASE("nlrelu forward hand values") {
  CHECK(nlrelu_forward(0.0) == 0.0);
  CHECK(nlrelu_forward(std::exp(1.0) - 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nlrelu_forward(-2.0) == 0.0);
  // equal input spacing, shrinking output increments
  CHECK(1.5 - 1.2 == doctest::Approx(1.8 - 1.5));
  CHECK(std::log(1.5) - std::log(1.2) > std::log(1.8) - std::log(1.5));
  CHECK(nlrelu_forward(1.5) - nlrelu_forward(1.2) > nlrelu_forward(1.8) - nlrelu_forward(1.5));
}

TEST_CASE("nlrelu backward hand values and finite difference") {
  CHECK(nlrelu_backward(1.0) == 0.5);
  CHECK(nlrelu_backward(-1.0) == 0.0);
  CHECK(nlrelu_backward(0.0) == 0.0);
  Activation f{ActivationKind::NLReLU};
  CHECK(std::abs(nlrelu_backward(0.37) - central_diff(f, 0.37)) <= 1e-8);
}

TEST_CASE("activation name lookup is total over the eight kinds") {
  CHECK(all_activation_kinds().size() == 8);
  for (ActivationKind k : all_activation_kinds()) {
    auto round = activation_from_name(activation_name(k));
    REQUIRE(round.has_value());
    CHECK(*round == k);
  }
  CHECK(!activation_from_name("swish").has_value());
  CHECK(!activation_from_name("ReLU").has_value());  // names are lower-case
}

TEST_CASE("fixed-point values of the published formulas") {
  CHECK(Activation{ActivationKind::Sigmoid}(0.0) == 0.5);
  CHECK(Activation{ActivationKind::ReLU}(-3.0) == 0.0);
  CHECK(Activation{ActivationKind::ReLU}(3.0) == 3.0);
  CHECK(Activation{ActivationKind::SELU}(0.0) == 0.0);
  CHECK(Activation{ActivationKind::Softplus}(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(Activation{ActivationKind::ELU}(-1e9) == doctest::Approx(-kELUAlpha).epsilon(1e-12));
  CHECK(Activation{ActivationKind::LReLU}(-2.0) == doctest::Approx(-0.02));
  CHECK(Activation{ActivationKind::PReLU, 0.25}(-2.0) == doctest::Approx(-0.5));
  // SELU derivative at 1 against finite differences
  Activation selu{ActivationKind::SELU};
  CHECK(std::abs(selu.derivative(1.0) - central_diff(selu, 1.0)) <= 1e-6);
}

TEST_CASE("every derivative matches central finite differences away from kinks") {
  Rng rng(314);
  for (ActivationKind k : all_activation_kinds()) {
    Activation f{k, 0.25};
    for (int i = 0; i < 500; ++i) {
      double x = rng.uniform(-10.0, 10.0);
      if (std::abs(x) < 1e-3) continue;
      const double fd = central_diff(f, x);
      const double an = f.derivative(x);
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("prelu slope derivative matches finite differences in the slope") {
  const double eps = 1e-6;
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    double x = rng.uniform(-5.0, 5.0);
    Activation lo{ActivationKind::PReLU, 0.25 - eps};
    Activation hi{ActivationKind::PReLU, 0.25 + eps};
    double fd = (hi(x) - lo(x)) / (2 * eps);
    CHECK(std::abs(Activation{ActivationKind::PReLU, 0.25}.slope_derivative(x) - fd) <= 1e-6);
  }
  CHECK(Activation{ActivationKind::ReLU}.slope_derivative(-3.0) == 0.0);
}

TEST_CASE("nlrelu is dominated by relu on the positive axis") {
  Rng rng(12);
  Activation nl{ActivationKind::NLReLU}, re{ActivationKind::ReLU};
  CHECK(nl(0.0) == re(0.0));
  for (int i = 0; i < 2000; ++i) {
    double x = rng.uniform(1e-12, 50.0);
    CHECK(nl(x) < re(x));
    CHECK(nl(x) >= 0.0);
  }
}

TEST_CASE("nlrelu monotonicity and concave increments") {
  Rng rng(13);
  Activation nl{ActivationKind::NLReLU};
  for (int i = 0; i < 2000; ++i) {
    double x1 = rng.uniform(-20.0, 20.0);
    double x2 = rng.uniform(-20.0, 20.0);
    if (x1 > x2) std::swap(x1, x2);
    CHECK(nl(x1) <= nl(x2));
  }
  for (int i = 0; i < 2000; ++i) {
    double x1 = rng.uniform(1e-6, 10.0);
    double step = rng.uniform(1e-6, 5.0);
    double a = nl(x1 + step) - nl(x1);
    double b = nl(x1 + 2 * step) - nl(x1 + step);
    CHECK(a > b);
  }
}

TEST_CASE("tensor-level apply matches scalar evaluation and stays finite") {
  Rng rng(77);
  Tensor x({64});
  for (double& v : x.data()) v = rng.uniform(-700.0, 700.0);
  for (ActivationKind k : all_activation_kinds()) {
    Activation f{k, 0.25};
    Tensor y = f.apply(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(y[i] == f(x[i]));
      CHECK(std::isfinite(y[i]));
    }
  }
}
