#include "pec/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pec/error.hpp"

namespace pec::nn {

void softmax_inplace(std::span<double> row) {
  if (row.empty()) return;
  const double peak = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (auto& v : row) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (auto& v : row) v /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  softmax_inplace(out);
  return out;
}

void matmul_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* o = out + i * n;
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += av * bp[j];
    }
  }
}

void matmul_tn_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    const double* bi = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      if (av == 0.0) continue;
      double* o = out + p * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += av * bi[j];
    }
  }
}

void matmul_nt_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * n;
    double* o = out + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* bp = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += ai[j] * bp[j];
      o[p] += acc;
    }
  }
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation act) {
  const std::size_t rows = x.rows();
  const std::size_t in = x.cols();
  if (w.rows() != in) {
    throw NumericError("dense: input width " + std::to_string(in) + " does not match weight rows " +
                       std::to_string(w.rows()));
  }
  const std::size_t out = w.cols();
  if (b.size() != out) throw NumericError("dense: bias length does not match weight columns");

  Tensor y(rows, out);
  for (std::size_t r = 0; r < rows; ++r) std::copy(b.values().begin(), b.values().end(), y.row(r).begin());
  matmul_acc(x.data(), w.data(), y.data(), rows, in, out);

  switch (act) {
    case Activation::none: break;
    case Activation::relu:
      for (auto& v : y.values()) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::softmax:
      for (std::size_t r = 0; r < rows; ++r) softmax_inplace(y.row(r));
      break;
  }
  return y;
}

Tensor activation_backward(Activation act, const Tensor& y, const Tensor& dy) {
  Tensor dz(y.rows(), y.cols());
  switch (act) {
    case Activation::none:
      std::copy(dy.values().begin(), dy.values().end(), dz.values().begin());
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < y.size(); ++i) dz[i] = y[i] > 0.0 ? dy[i] : 0.0;
      break;
    case Activation::softmax:
      for (std::size_t r = 0; r < y.rows(); ++r) {
        auto s = y.row(r);
        auto g = dy.row(r);
        double dot = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) dot += s[j] * g[j];
        auto z = dz.row(r);
        for (std::size_t j = 0; j < s.size(); ++j) z[j] = s[j] * (g[j] - dot);
      }
      break;
  }
  return dz;
}

Tensor dense_backward(const Tensor& x, Tensor& w, Tensor& b, Activation act, const Tensor& y, const Tensor& dy) {
  const std::size_t rows = x.rows();
  const std::size_t in = x.cols();
  const std::size_t out = w.cols();
  if (dy.rows() != rows || dy.cols() != out) throw NumericError("dense backward: upstream gradient shape mismatch");

  const Tensor dz = activation_backward(act, y, dy);
  matmul_tn_acc(x.data(), dz.data(), w.grad().data(), rows, in, out);
  auto bg = b.grad();
  for (std::size_t r = 0; r < rows; ++r) {
    auto z = dz.row(r);
    for (std::size_t j = 0; j < out; ++j) bg[j] += z[j];
  }
  Tensor dx(rows, in);
  matmul_nt_acc(dz.data(), w.data(), dx.data(), rows, out, in);
  return dx;
}

namespace {

void check_probs(std::span<const double> probs, std::size_t target) {
  if (target >= probs.size()) {
    throw NumericError("cross-entropy target " + std::to_string(target) + " out of range for " +
                       std::to_string(probs.size()) + " classes");
  }
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (std::abs(sum - 1.0) > 1e-6) throw NumericError("cross-entropy input does not sum to 1");
}

}  // namespace

double weighted_cross_entropy(std::span<const double> probs, std::size_t target, double weight) {
  check_probs(probs, target);
  return -weight * std::log(probs[target] + kLogEpsilon);
}

std::vector<double> weighted_cross_entropy_grad(std::span<const double> probs, std::size_t target, double weight) {
  check_probs(probs, target);
  std::vector<double> g(probs.size(), 0.0);
  g[target] = -weight / (probs[target] + kLogEpsilon);
  return g;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace pec::nn
