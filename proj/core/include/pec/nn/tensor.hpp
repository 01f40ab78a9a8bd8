#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pec::nn {

/// Dense row-major double array with an optional gradient slot of the same
/// shape. Rank-1 tensors behave as a single row in the 2-D accessors.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor row_vector(std::vector<double> values);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols(), cols()}; }

  bool has_grad() const noexcept { return grad_.size() == values_.size(); }
  /// Allocates a zeroed gradient on first use.
  std::span<double> grad();
  std::span<const double> grad() const noexcept { return grad_; }
  void zero_grad();
  void fill(double value);

  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
};

/// Throws NumericError unless the tensor has exactly the given 2-D shape.
void expect_shape(const Tensor& t, std::size_t rows, std::size_t cols, const char* what);

}  // namespace pec::nn
