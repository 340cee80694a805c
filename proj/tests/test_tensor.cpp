#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "agcnn/reference.hpp"
#include "agcnn/tensor.hpp"
#include "test_util.hpp"

using namespace agcnn;

TEST_CASE("elementwise_product matches hand cases") {
  Tensor mask = Tensor::row_matrix({{1, 0}, {0, 1}});
  Tensor vals = Tensor::row_matrix({{1, 2}, {3, 4}});
  Tensor out = elementwise_product(mask, vals);
  CHECK(out(0, 0) == 1.0);
  CHECK(out(0, 1) == 0.0);
  CHECK(out(1, 0) == 0.0);
  CHECK(out(1, 1) == 4.0);
}

TEST_CASE("elementwise_product identity and oracle") {
  Rng rng(42);
  Tensor x = testutil::random_tensor({3, 4}, rng, 5.0);
  Tensor ones = Tensor::full({3, 4}, 1.0);
  Tensor idp = elementwise_product(x, ones);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(idp[i] == x[i]);

  Tensor y = testutil::random_tensor({3, 4}, rng, 5.0);
  Tensor got = elementwise_product(x, y);
  // scalar double-loop oracle
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(got(i, j) == x(i, j) * y(i, j));
}

TEST_CASE("elementwise_product rejects mismatched shapes naming both") {
  Tensor a({2, 3});
  Tensor b({3, 2});
  CHECK_THROWS_WITH_AS(elementwise_product(a, b),
                       doctest::Contains("(2,3)"), std::invalid_argument);
  try {
    elementwise_product(a, b);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("(3,2)") != std::string::npos);
  }
}

TEST_CASE("sum_all hand cases and oracle") {
  CHECK(sum_all(Tensor::row_matrix({{1, 2}, {3, 4}})) == 10.0);
  CHECK(sum_all(Tensor({5, 5})) == 0.0);
  CHECK(sum_all(Tensor()) == 0.0);

  Rng rng(7);
  Tensor v = testutil::random_tensor({7}, rng, 100.0);
  CHECK(std::abs(sum_all(v) - ref::sum_sequential(v)) <= 1e-12);
}

TEST_CASE("sum_all is permutation-invariant to 1e-12") {
  Rng rng(11);
  std::vector<double> vals(10000);
  for (double& v : vals) v = rng.uniform(-1e3, 1e3);
  Tensor a = Tensor::vector1d(vals);
  double s1 = sum_all(a);
  for (int round = 0; round < 5; ++round) {
    for (std::size_t i = vals.size(); i > 1; --i)
      std::swap(vals[i - 1], vals[static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i))]);
    CHECK(std::abs(sum_all(Tensor::vector1d(vals)) - s1) <= 1e-12);
  }
}

TEST_CASE("he_init statistics and determinism") {
  Rng rng(123);
  Tensor big = he_init({100000}, 12, rng);
  double mean = sum_all(big) / 1e5;
  double ss = 0.0;
  for (double v : big.data()) ss += (v - mean) * (v - mean);
  double var = ss / (1e5 - 1);
  CHECK(var == doctest::Approx(2.0 / 12.0).epsilon(0.05));

  Rng r1(55), r2(55);
  Tensor a = he_init({3, 4}, 12, r1);
  Tensor b = he_init({3, 4}, 12, r2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  Rng r3(9);
  Tensor c = he_init({100000}, 2, r3);
  double m2 = sum_all(c) / 1e5, ss2 = 0.0;
  for (double v : c.data()) ss2 += (v - m2) * (v - m2);
  CHECK(std::sqrt(ss2 / (1e5 - 1)) == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(he_init({2}, 0, r3), std::invalid_argument);
}

TEST_CASE("xavier_init bound, variance and determinism") {
  Rng rng(321);
  const double limit = std::sqrt(6.0 / 106.0);
  Tensor big = xavier_init({100000}, 100, 6, rng);
  for (double v : big.data()) {
    CHECK(v <= limit);
    CHECK(v >= -limit);
  }

  Rng r1(66), r2(66);
  Tensor a = xavier_init({4, 4}, 8, 8, r1);
  Tensor b = xavier_init({4, 4}, 8, 8, r2);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  // fan_in = fan_out = 3 -> L = 1, variance L^2/3
  Rng r3(77);
  Tensor c = xavier_init({100000}, 3, 3, r3);
  double mean = sum_all(c) / 1e5, ss = 0.0;
  for (double v : c.data()) ss += (v - mean) * (v - mean);
  CHECK(ss / (1e5 - 1) == doctest::Approx(1.0 / 3.0).epsilon(0.05));

  CHECK_THROWS_AS(xavier_init({2}, 0, 3, r3), std::invalid_argument);
  CHECK_THROWS_AS(xavier_init({2}, 3, 0, r3), std::invalid_argument);
}

TEST_CASE("max_over_time value, tie rule and oracle") {
  auto r = max_over_time(Tensor::vector1d({5, 9}));
  CHECK(r.value == 9.0);
  CHECK(r.index == 1);

  auto tie = max_over_time(Tensor::vector1d({3, 3, 1}));
  CHECK(tie.value == 3.0);
  CHECK(tie.index == 0);

  Rng rng(5);
  Tensor v = testutil::random_tensor({20}, rng, 10.0);
  auto got = max_over_time(v);
  CHECK(got.index == ref::argmax_linear_scan(v.data()));
  CHECK(got.value == v[got.index]);

  CHECK_THROWS_AS(max_over_time(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("row-major indexing round-trips") {
  Rng rng(8);
  Tensor t({7, 9});
  for (int n = 0; n < 200; ++n) {
    std::size_t i = static_cast<std::size_t>(rng.uniform01() * 7);
    std::size_t j = static_cast<std::size_t>(rng.uniform01() * 9);
    double v = rng.uniform(-5, 5);
    t(i, j) = v;
    CHECK(t[i * 9 + j] == v);
    t[i * 9 + j] = v + 1;
    CHECK(t(i, j) == v + 1);
  }
}

TEST_CASE("rng streams are reproducible and forks are independent") {
  Rng a(2024), b(2024);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());

  Rng f1 = Rng(2024).fork(1);
  Rng f2 = Rng(2024).fork(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += f1.next_u64() == f2.next_u64();
  CHECK(same == 0);
}
