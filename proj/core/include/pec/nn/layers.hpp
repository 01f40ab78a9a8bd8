#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pec/nn/ops.hpp"
#include "pec/nn/state.hpp"
#include "pec/nn/tensor.hpp"
#include "pec/rng.hpp"

namespace pec::nn {

/// Fully connected layer whose parameters live in a ModelState.
struct Dense {
  ParamId weight = 0;
  ParamId bias = 0;
  Activation activation = Activation::none;

  static Dense create(ModelState& state, const std::string& name, std::size_t in, std::size_t out, Activation act,
                      Rng& rng);

  Tensor forward(const ModelState& state, const Tensor& x) const;
  /// Returns dL/dx; accumulates parameter gradients.
  Tensor backward(ModelState& state, const Tensor& x, const Tensor& y, const Tensor& dy) const;
};

/// Result of one LSTM step; gates hold activated (i, f, g, o) blocks.
struct LstmCellOutput {
  std::vector<double> h;
  std::vector<double> c;
  std::vector<double> gates;
};

/// z = x Wx + h_prev Wh + b; i,f,o = sigmoid, g = tanh; c = f*c_prev + i*g;
/// h = o * tanh(c). Wx: in x 4H, Wh: H x 4H, b: 4H.
LstmCellOutput lstm_cell(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                         const Tensor& wx, const Tensor& wh, const Tensor& b);

struct Lstm {
  ParamId wx = 0;
  ParamId wh = 0;
  ParamId bias = 0;
  std::size_t input = 0;
  std::size_t hidden = 0;

  /// Forget-gate bias starts at +1, other biases at 0.
  static Lstm create(ModelState& state, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng);

  /// Rows are indexed by sequence position regardless of direction.
  struct Trace {
    Tensor gates;   // T x 4H
    Tensor cells;   // T x H
    Tensor hidden;  // T x H
    bool reverse = false;
  };

  /// Throws NumericError on an empty sequence or width mismatch.
  Trace forward(const ModelState& state, const Tensor& x, bool reverse) const;
  /// dh: T x H gradient on the hidden outputs. Returns dL/dx.
  Tensor backward(ModelState& state, const Tensor& x, const Trace& trace, const Tensor& dh) const;
};

/// Forward and reversed LSTMs; per-step output is [h_fwd ; h_bwd].
struct BiLstm {
  Lstm fwd;
  Lstm bwd;

  static BiLstm create(ModelState& state, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng);

  std::size_t output_size() const noexcept { return 2 * fwd.hidden; }

  struct Trace {
    Lstm::Trace f;
    Lstm::Trace b;
    Tensor outputs;  // T x 2H
  };

  Trace forward(const ModelState& state, const Tensor& x) const;
  Tensor backward(ModelState& state, const Tensor& x, const Trace& trace, const Tensor& doutputs) const;

  /// [h_fwd at T-1 ; h_bwd at 0]
  static std::vector<double> final_states(const Trace& trace);
  /// Scatters a gradient on final_states() into a T x 2H output gradient.
  static void final_states_backward(std::span<const double> dfinal, Tensor& doutputs);
};

/// s_t = v . tanh(h_t W); alpha = softmax(s); context = sum_t alpha_t h_t.
struct Attention {
  ParamId weight = 0;  // d x a
  ParamId score = 0;   // a

  static Attention create(ModelState& state, const std::string& name, std::size_t dim, std::size_t attn_dim, Rng& rng);

  struct Trace {
    Tensor projected;  // T x a, tanh(h W)
    std::vector<double> alpha;
    std::vector<double> context;
  };

  Trace forward(const ModelState& state, const Tensor& states) const;
  /// Returns dL/dstates.
  Tensor backward(ModelState& state, const Tensor& states, const Trace& trace, std::span<const double> dcontext) const;
};

/// Functional form of the attention layer for arbitrary parameter tensors.
Attention::Trace additive_attention(const Tensor& states, const Tensor& w, const Tensor& v);

}  // namespace pec::nn
