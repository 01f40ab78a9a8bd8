#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pec/nn/tensor.hpp"

namespace pec::nn {

enum class Activation { none, relu, softmax };

/// Row-wise softmax; max-shifted.
void softmax_inplace(std::span<double> row);
std::vector<double> softmax(std::span<const double> logits);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// y = act(x W + b) for x: rows x in, W: in x out, b: out.
/// Throws NumericError on shape mismatch.
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation act);

/// Backward of dense_forward given its output y and upstream dy.
/// Accumulates into w.grad() and b.grad(); returns dL/dx.
Tensor dense_backward(const Tensor& x, Tensor& w, Tensor& b, Activation act, const Tensor& y, const Tensor& dy);

/// dL/dz from dL/dy through the activation, using the forward output y.
Tensor activation_backward(Activation act, const Tensor& y, const Tensor& dy);

/// -weight * ln(probs[target] + 1e-12). Throws NumericError when target is
/// out of range or probs does not sum to 1 within 1e-6.
double weighted_cross_entropy(std::span<const double> probs, std::size_t target, double weight);

/// Gradient of weighted_cross_entropy with respect to probs.
std::vector<double> weighted_cross_entropy_grad(std::span<const double> probs, std::size_t target, double weight);

inline constexpr double kLogEpsilon = 1e-12;

/// Lowest index among the maxima.
std::size_t argmax(std::span<const double> values);

// --- small matrix helpers (row-major, accumulate into out) ---

/// out (m x n) += a (m x k) * b (k x n)
void matmul_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n);
/// out (k x n) += a^T * b with a: m x k, b: m x n
void matmul_tn_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n);
/// out (m x k) += a (m x n) * b^T with b: k x n
void matmul_nt_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t n, std::size_t k);

}  // namespace pec::nn
