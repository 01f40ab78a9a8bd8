#include "pec/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

#include "pec/error.hpp"

namespace pec::nn {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(product(shape_), fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill) : Tensor(std::vector<std::size_t>{rows, cols}, fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != product(shape_)) {
    throw NumericError("tensor value count " + std::to_string(values_.size()) + " does not match shape");
  }
}

Tensor Tensor::row_vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::rows() const noexcept {
  if (shape_.empty()) return 1;
  if (shape_.size() == 1) return 1;
  return shape_[0];
}

std::size_t Tensor::cols() const noexcept {
  if (shape_.empty()) return 1;
  if (shape_.size() == 1) return shape_[0];
  return values_.size() / shape_[0];
}

std::span<double> Tensor::grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), 0.0);
  return grad_;
}

void Tensor::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void expect_shape(const Tensor& t, std::size_t rows, std::size_t cols, const char* what) {
  if (t.rows() != rows || t.cols() != cols) {
    throw NumericError(std::string(what) + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                       ", got " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
  }
}

}  // namespace pec::nn
