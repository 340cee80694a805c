#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace agcnn {

/// Dense n-dimensional array of 64-bit floats in row-major order.
/// Values are treated as immutable once an operation has produced them;
/// sharing across threads for reading is safe.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor row_matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor vector1d(std::vector<double> values);

  std::size_t size() const { return data_.size(); }
  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  bool empty() const { return data_.empty(); }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * shape_[1], shape_[1]);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data_).subspan(i * shape_[1], shape_[1]);
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void fill(double value);

  /// "(3,4)" style rendering for error messages.
  std::string shape_string() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Deterministic PRNG: xoshiro256++ state expanded from the seed with
/// splitmix64; normals via Box-Muller with a cached spare. Identical seed
/// gives an identical draw sequence on every run. Single-owner, not shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();  // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double stddev);

  /// Independent derived stream; deterministic in (seed, stream).
  Rng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  static constexpr const char* algorithm() { return "xoshiro256++ (splitmix64 seeding, Box-Muller normals)"; }

 private:
  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Element-wise product; shapes must match exactly.
Tensor elementwise_product(const Tensor& a, const Tensor& b);

/// Sum of all elements (compensated Neumaier accumulation). Empty -> 0.
double sum_all(const Tensor& a);

/// He initialization: i.i.d. Normal(0, 2/fan_in) draws in flat order.
Tensor he_init(std::vector<std::size_t> shape, std::size_t fan_in, Rng& rng);

/// Xavier initialization: i.i.d. Uniform(-L, L), L = sqrt(6/(fan_in+fan_out)).
Tensor xavier_init(std::vector<std::size_t> shape, std::size_t fan_in, std::size_t fan_out, Rng& rng);

struct MaxOverTime {
  double value = 0.0;
  std::size_t index = 0;
};

/// Maximum and the smallest index attaining it; the index feeds the pooling
/// backward pass and the visualizer.
MaxOverTime max_over_time(std::span<const double> m);
MaxOverTime max_over_time(const Tensor& m);

std::string shape_string(std::span<const std::size_t> shape);

}  // namespace agcnn
