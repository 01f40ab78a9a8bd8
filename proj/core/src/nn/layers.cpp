#include "pec/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "pec/error.hpp"

namespace pec::nn {

Dense Dense::create(ModelState& state, const std::string& name, std::size_t in, std::size_t out, Activation act,
                    Rng& rng) {
  Dense d;
  d.weight = state.add(name + ".W", {in, out});
  d.bias = state.add(name + ".b", {out});
  d.activation = act;
  init_uniform(state[d.weight], in, rng);
  return d;
}

Tensor Dense::forward(const ModelState& state, const Tensor& x) const {
  return dense_forward(x, state[weight], state[bias], activation);
}

Tensor Dense::backward(ModelState& state, const Tensor& x, const Tensor& y, const Tensor& dy) const {
  return dense_backward(x, state[weight], state[bias], activation, y, dy);
}

LstmCellOutput lstm_cell(std::span<const double> x, std::span<const double> h_prev, std::span<const double> c_prev,
                         const Tensor& wx, const Tensor& wh, const Tensor& b) {
  const std::size_t hidden = h_prev.size();
  const std::size_t four = 4 * hidden;
  if (wx.rows() != x.size() || wx.cols() != four || wh.rows() != hidden || wh.cols() != four || b.size() != four ||
      c_prev.size() != hidden) {
    throw NumericError("lstm_cell: inconsistent parameter shapes");
  }
  std::vector<double> z(b.values().begin(), b.values().end());
  matmul_acc(x.data(), wx.data(), z.data(), 1, x.size(), four);
  matmul_acc(h_prev.data(), wh.data(), z.data(), 1, hidden, four);

  LstmCellOutput out;
  out.gates.resize(four);
  out.c.resize(hidden);
  out.h.resize(hidden);
  for (std::size_t k = 0; k < hidden; ++k) {
    const double i = sigmoid(z[k]);
    const double f = sigmoid(z[hidden + k]);
    const double g = std::tanh(z[2 * hidden + k]);
    const double o = sigmoid(z[3 * hidden + k]);
    out.gates[k] = i;
    out.gates[hidden + k] = f;
    out.gates[2 * hidden + k] = g;
    out.gates[3 * hidden + k] = o;
    out.c[k] = f * c_prev[k] + i * g;
    out.h[k] = o * std::tanh(out.c[k]);
  }
  return out;
}

Lstm Lstm::create(ModelState& state, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng) {
  Lstm l;
  l.input = input;
  l.hidden = hidden;
  l.wx = state.add(name + ".Wx", {input, 4 * hidden});
  l.wh = state.add(name + ".Wh", {hidden, 4 * hidden});
  l.bias = state.add(name + ".b", {4 * hidden});
  init_uniform(state[l.wx], input, rng);
  init_uniform(state[l.wh], hidden, rng);
  auto b = state[l.bias].values();
  for (std::size_t k = hidden; k < 2 * hidden; ++k) b[k] = 1.0;
  return l;
}

Lstm::Trace Lstm::forward(const ModelState& state, const Tensor& x, bool reverse) const {
  const std::size_t steps = x.rows();
  if (steps == 0 || x.size() == 0) throw NumericError("lstm: empty sequence");
  if (x.cols() != input) throw NumericError("lstm: input width does not match layer");

  Trace tr;
  tr.reverse = reverse;
  tr.gates = Tensor(steps, 4 * hidden);
  tr.cells = Tensor(steps, hidden);
  tr.hidden = Tensor(steps, hidden);

  std::vector<double> h(hidden, 0.0);
  std::vector<double> c(hidden, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    auto out = lstm_cell(x.row(t), h, c, state[wx], state[wh], state[bias]);
    std::copy(out.gates.begin(), out.gates.end(), tr.gates.row(t).begin());
    std::copy(out.c.begin(), out.c.end(), tr.cells.row(t).begin());
    std::copy(out.h.begin(), out.h.end(), tr.hidden.row(t).begin());
    h = std::move(out.h);
    c = std::move(out.c);
  }
  return tr;
}

Tensor Lstm::backward(ModelState& state, const Tensor& x, const Trace& trace, const Tensor& dh) const {
  const std::size_t steps = x.rows();
  const std::size_t four = 4 * hidden;
  expect_shape(dh, steps, hidden, "lstm backward dh");

  Tensor dx(steps, input);
  auto dwx = state[wx].grad();
  auto dwh = state[wh].grad();
  auto db = state[bias].grad();
  const Tensor& wxv = state[wx];
  const Tensor& whv = state[wh];

  std::vector<double> dh_next(hidden, 0.0);
  std::vector<double> dc_next(hidden, 0.0);
  std::vector<double> dz(four);
  const std::vector<double> zeros(hidden, 0.0);

  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = trace.reverse ? steps - 1 - s : s;
    const bool first = s == 0;
    const std::size_t prev = trace.reverse ? t + 1 : t - 1;  // valid only when !first
    std::span<const double> c_prev = first ? std::span<const double>(zeros) : trace.cells.row(prev);
    std::span<const double> h_prev = first ? std::span<const double>(zeros) : trace.hidden.row(prev);

    auto gates = trace.gates.row(t);
    auto c = trace.cells.row(t);
    auto dh_out = dh.row(t);
    for (std::size_t k = 0; k < hidden; ++k) {
      const double i = gates[k];
      const double f = gates[hidden + k];
      const double g = gates[2 * hidden + k];
      const double o = gates[3 * hidden + k];
      const double tc = std::tanh(c[k]);
      const double dht = dh_out[k] + dh_next[k];
      const double dct = dc_next[k] + dht * o * (1.0 - tc * tc);
      dz[k] = dct * g * i * (1.0 - i);
      dz[hidden + k] = dct * c_prev[k] * f * (1.0 - f);
      dz[2 * hidden + k] = dct * i * (1.0 - g * g);
      dz[3 * hidden + k] = dht * tc * o * (1.0 - o);
      dc_next[k] = dct * f;
    }
    matmul_tn_acc(x.row(t).data(), dz.data(), dwx.data(), 1, input, four);
    matmul_tn_acc(h_prev.data(), dz.data(), dwh.data(), 1, hidden, four);
    for (std::size_t k = 0; k < four; ++k) db[k] += dz[k];
    matmul_nt_acc(dz.data(), wxv.data(), dx.row(t).data(), 1, four, input);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    matmul_nt_acc(dz.data(), whv.data(), dh_next.data(), 1, four, hidden);
  }
  return dx;
}

BiLstm BiLstm::create(ModelState& state, const std::string& name, std::size_t input, std::size_t hidden, Rng& rng) {
  BiLstm bl;
  bl.fwd = Lstm::create(state, name + ".fwd", input, hidden, rng);
  bl.bwd = Lstm::create(state, name + ".bwd", input, hidden, rng);
  return bl;
}

BiLstm::Trace BiLstm::forward(const ModelState& state, const Tensor& x) const {
  Trace tr;
  tr.f = fwd.forward(state, x, false);
  tr.b = bwd.forward(state, x, true);
  const std::size_t steps = x.rows();
  const std::size_t h = fwd.hidden;
  tr.outputs = Tensor(steps, 2 * h);
  for (std::size_t t = 0; t < steps; ++t) {
    auto row = tr.outputs.row(t);
    std::copy(tr.f.hidden.row(t).begin(), tr.f.hidden.row(t).end(), row.begin());
    std::copy(tr.b.hidden.row(t).begin(), tr.b.hidden.row(t).end(), row.begin() + static_cast<std::ptrdiff_t>(h));
  }
  return tr;
}

Tensor BiLstm::backward(ModelState& state, const Tensor& x, const Trace& trace, const Tensor& doutputs) const {
  const std::size_t steps = x.rows();
  const std::size_t h = fwd.hidden;
  Tensor df(steps, h);
  Tensor db(steps, h);
  for (std::size_t t = 0; t < steps; ++t) {
    auto row = doutputs.row(t);
    std::copy(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(h), df.row(t).begin());
    std::copy(row.begin() + static_cast<std::ptrdiff_t>(h), row.end(), db.row(t).begin());
  }
  Tensor dx = fwd.backward(state, x, trace.f, df);
  Tensor dxb = bwd.backward(state, x, trace.b, db);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dxb[i];
  return dx;
}

std::vector<double> BiLstm::final_states(const Trace& trace) {
  const std::size_t steps = trace.outputs.rows();
  const std::size_t h = trace.f.hidden.cols();
  std::vector<double> out(2 * h);
  auto last = trace.f.hidden.row(steps - 1);
  auto first = trace.b.hidden.row(0);
  std::copy(last.begin(), last.end(), out.begin());
  std::copy(first.begin(), first.end(), out.begin() + static_cast<std::ptrdiff_t>(h));
  return out;
}

void BiLstm::final_states_backward(std::span<const double> dfinal, Tensor& doutputs) {
  const std::size_t steps = doutputs.rows();
  const std::size_t h = dfinal.size() / 2;
  auto last = doutputs.row(steps - 1);
  auto first = doutputs.row(0);
  for (std::size_t k = 0; k < h; ++k) {
    last[k] += dfinal[k];
    first[h + k] += dfinal[h + k];
  }
}

Attention::Trace additive_attention(const Tensor& states, const Tensor& w, const Tensor& v) {
  const std::size_t steps = states.rows();
  const std::size_t dim = states.cols();
  if (steps == 0) throw NumericError("attention: empty sequence");
  if (w.rows() != dim || v.size() != w.cols()) throw NumericError("attention: parameter shape mismatch");
  const std::size_t a = w.cols();

  Attention::Trace tr;
  tr.projected = Tensor(steps, a);
  matmul_acc(states.data(), w.data(), tr.projected.data(), steps, dim, a);
  for (auto& u : tr.projected.values()) u = std::tanh(u);

  tr.alpha.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto u = tr.projected.row(t);
    double s = 0.0;
    for (std::size_t k = 0; k < a; ++k) s += v[k] * u[k];
    tr.alpha[t] = s;
  }
  softmax_inplace(tr.alpha);

  tr.context.assign(dim, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    auto h = states.row(t);
    for (std::size_t k = 0; k < dim; ++k) tr.context[k] += tr.alpha[t] * h[k];
  }
  return tr;
}

Attention Attention::create(ModelState& state, const std::string& name, std::size_t dim, std::size_t attn_dim,
                            Rng& rng) {
  Attention at;
  at.weight = state.add(name + ".W", {dim, attn_dim});
  at.score = state.add(name + ".v", {attn_dim});
  init_uniform(state[at.weight], dim, rng);
  init_uniform(state[at.score], attn_dim, rng);
  return at;
}

Attention::Trace Attention::forward(const ModelState& state, const Tensor& states) const {
  return additive_attention(states, state[weight], state[score]);
}

Tensor Attention::backward(ModelState& state, const Tensor& states, const Trace& trace,
                           std::span<const double> dcontext) const {
  const std::size_t steps = states.rows();
  const std::size_t dim = states.cols();
  const Tensor& w = state[weight];
  const Tensor& v = state[score];
  const std::size_t a = w.cols();

  Tensor dstates(steps, dim);
  // context = sum alpha_t h_t
  std::vector<double> dalpha(steps, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    auto h = states.row(t);
    auto dh = dstates.row(t);
    for (std::size_t k = 0; k < dim; ++k) {
      dalpha[t] += dcontext[k] * h[k];
      dh[k] += trace.alpha[t] * dcontext[k];
    }
  }
  double dot = 0.0;
  for (std::size_t t = 0; t < steps; ++t) dot += trace.alpha[t] * dalpha[t];

  auto dv = state[score].grad();
  Tensor dpre(steps, a);
  for (std::size_t t = 0; t < steps; ++t) {
    const double ds = trace.alpha[t] * (dalpha[t] - dot);
    auto u = trace.projected.row(t);
    auto dp = dpre.row(t);
    for (std::size_t k = 0; k < a; ++k) {
      dv[k] += ds * u[k];
      dp[k] = ds * v[k] * (1.0 - u[k] * u[k]);
    }
  }
  matmul_tn_acc(states.data(), dpre.data(), state[weight].grad().data(), steps, dim, a);
  matmul_nt_acc(dpre.data(), w.data(), dstates.data(), steps, a, dim);
  return dstates;
}

}  // namespace pec::nn
