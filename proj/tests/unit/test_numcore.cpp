#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pec/error.hpp"
#include "pec/nn/checkpoint.hpp"
#include "pec/nn/gradcheck.hpp"
#include "pec/nn/layers.hpp"
#include "pec/nn/ops.hpp"
#include "pec/nn/state.hpp"
#include "pec/rng.hpp"

using namespace pec;
using namespace pec::nn;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Tensor t(rows, cols);
  for (auto& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Randomises every parameter, including the zero-initialised biases.
void jitter(ModelState& state, Rng& rng) {
  for (ParamId p = 0; p < state.size(); ++p)
    for (auto& v : state[p].values()) v = rng.uniform(-0.5, 0.5);
}

}  // namespace

TEST_CASE("dense identity") {
  ModelState state;
  Rng rng(1);
  auto layer = Dense::create(state, "d", 3, 3, Activation::none, rng);
  auto& w = state[layer.weight];
  w.fill(0.0);
  for (std::size_t i = 0; i < 3; ++i) w(i, i) = 1.0;
  const auto x = random_tensor(2, 3, rng);
  const auto y = layer.forward(state, x);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("dense rejects shape mismatch") {
  ModelState state;
  Rng rng(1);
  auto layer = Dense::create(state, "d", 3, 2, Activation::none, rng);
  CHECK_THROWS_AS(layer.forward(state, Tensor(1, 4)), NumericError);
}

TEST_CASE("softmax") {
  const std::vector<double> zeros(7, 0.0);
  for (double p : softmax(zeros)) CHECK(p == doctest::Approx(1.0 / 7.0));

  Rng rng(3);
  for (int round = 0; round < 100; ++round) {
    std::vector<double> logits(1 + rng.index(10));
    for (auto& v : logits) v = rng.uniform(-50, 50);
    const auto p = softmax(logits);
    double sum = 0;
    for (double v : p) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("weighted cross entropy") {
  const std::vector<double> uniform(7, 1.0 / 7.0);
  CHECK(weighted_cross_entropy(uniform, 3, 1.0) == doctest::Approx(std::log(7.0)));
  CHECK(weighted_cross_entropy(uniform, 3, 1.0) == doctest::Approx(1.9459).epsilon(1e-4));
  CHECK(weighted_cross_entropy(uniform, 3, 2.0) == doctest::Approx(2.0 * weighted_cross_entropy(uniform, 3, 1.0)));
  const std::vector<double> sure{0.0, 1.0, 0.0};
  CHECK(weighted_cross_entropy(sure, 1, 1.0) == doctest::Approx(0.0).epsilon(1e-11));
  CHECK_THROWS_AS(weighted_cross_entropy(sure, 5, 1.0), NumericError);
  const std::vector<double> bad{0.5, 0.2};
  CHECK_THROWS_AS(weighted_cross_entropy(bad, 0, 1.0), NumericError);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    ModelState state;
    const auto p = state.add("p", {3});
    state[p].values()[0] = 0.7;
    state[p].grad();
    adam_step(state, {.lr = 0.1});
    CHECK(state[p][0] == 0.7);
    CHECK(state.step == 1);
  }
  SUBCASE("first step moves by lr against the gradient sign") {
    for (double g : {3.0, -0.002}) {
      ModelState state;
      const auto p = state.add("p", {1});
      state[p].grad()[0] = g;
      adam_step(state, {.lr = 0.01});
      CHECK(state[p][0] == doctest::Approx(-0.01 * (g > 0 ? 1 : -1)).epsilon(1e-6));
    }
  }
  SUBCASE("quadratic bowl") {
    ModelState state;
    const auto p = state.add("w", {1});
    state[p][0] = 1.0;
    for (int t = 0; t < 200; ++t) {
      state.zero_grad();
      state[p].grad()[0] = 2.0 * state[p][0];
      adam_step(state, {.lr = 0.05});
    }
    CHECK(std::abs(state[p][0]) < 1e-2);
  }
  SUBCASE("non-finite gradient is rejected untouched") {
    ModelState state;
    const auto p = state.add("bad", {2});
    state[p].grad()[1] = std::nan("");
    CHECK_THROWS_AS(adam_step(state), NumericError);
    CHECK(state[p][0] == 0.0);
  }
}

TEST_CASE("dense gradient check") {
  Rng rng(11);
  for (auto act : {Activation::none, Activation::relu, Activation::softmax}) {
    ModelState state;
    auto layer = Dense::create(state, "d", 3, 4, act, rng);
    jitter(state, rng);
    const auto x = random_tensor(2, 3, rng);
    const auto r = random_tensor(2, 4, rng);
    const auto result = grad_check(state, [&](bool backward) {
      const auto y = layer.forward(state, x);
      if (backward) layer.backward(state, x, y, r);
      return dot(y, r);
    });
    CHECK(result.checked == 3 * 4 + 4);
    CHECK(result.max_relative_error < 1e-4);
  }
}

TEST_CASE("lstm") {
  Rng rng(5);
  SUBCASE("zero parameters give zero hidden states") {
    ModelState state;
    auto lstm = Lstm::create(state, "l", 2, 3, rng);
    for (ParamId p = 0; p < state.size(); ++p) state[p].fill(0.0);
    const auto trace = lstm.forward(state, random_tensor(4, 2, rng), false);
    for (double v : trace.hidden.values()) CHECK(v == 0.0);
  }
  SUBCASE("forget bias starts at one") {
    ModelState state;
    auto lstm = Lstm::create(state, "l", 2, 3, rng);
    const auto& b = state[lstm.bias];
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(b[j] == 0.0);
      CHECK(b[3 + j] == 1.0);
    }
  }
  SUBCASE("empty sequence throws") {
    ModelState state;
    auto lstm = Lstm::create(state, "l", 2, 3, rng);
    CHECK_THROWS_AS(lstm.forward(state, Tensor(0, 2), false), NumericError);
  }
  SUBCASE("gradient check") {
    for (bool reverse : {false, true}) {
      ModelState state;
      auto lstm = Lstm::create(state, "l", 2, 3, rng);
      jitter(state, rng);
      const auto x = random_tensor(4, 2, rng);
      const auto r = random_tensor(4, 3, rng);
      const auto result = grad_check(state, [&](bool backward) {
        const auto trace = lstm.forward(state, x, reverse);
        if (backward) lstm.backward(state, x, trace, r);
        return dot(trace.hidden, r);
      });
      CHECK(result.max_relative_error < 1e-4);
    }
  }
}

TEST_CASE("bilstm") {
  Rng rng(6);
  ModelState state;
  auto bi = BiLstm::create(state, "bi", 2, 3, rng);
  CHECK(state.find("bi.fwd.Wx").has_value());
  CHECK(state.find("bi.bwd.b").has_value());

  const auto one = bi.forward(state, random_tensor(1, 2, rng));
  CHECK(one.outputs.cols() == 6);
  CHECK(BiLstm::final_states(one).size() == 6);

  jitter(state, rng);
  const auto x = random_tensor(4, 2, rng);
  const auto r = random_tensor(4, 6, rng);
  const auto result = grad_check(state, [&](bool backward) {
    const auto trace = bi.forward(state, x);
    if (backward) bi.backward(state, x, trace, r);
    return dot(trace.outputs, r);
  });
  CHECK(result.max_relative_error < 1e-4);

  // input gradient against finite differences as well
  ModelState in_state;
  const auto xp = in_state.add("x", {4, 2});
  for (std::size_t i = 0; i < x.size(); ++i) in_state[xp][i] = x[i];
  const auto input_check = grad_check(in_state, [&](bool backward) {
    const auto trace = bi.forward(state, in_state[xp]);
    if (backward) {
      const auto dx = bi.backward(state, in_state[xp], trace, r);
      for (std::size_t i = 0; i < dx.size(); ++i) in_state[xp].grad()[i] += dx[i];
    }
    return dot(trace.outputs, r);
  });
  CHECK(input_check.max_relative_error < 1e-4);
}

TEST_CASE("attention") {
  Rng rng(7);
  ModelState state;
  auto attn = Attention::create(state, "a", 4, 3, rng);
  jitter(state, rng);

  const auto single = random_tensor(1, 4, rng);
  const auto t1 = attn.forward(state, single);
  for (std::size_t j = 0; j < 4; ++j) CHECK(t1.context[j] == doctest::Approx(single[j]));

  Tensor same(5, 4);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t j = 0; j < 4; ++j) same(t, j) = static_cast<double>(j) - 1.5;
  const auto ts = attn.forward(state, same);
  for (double a : ts.alpha) CHECK(a == doctest::Approx(0.2));
  for (std::size_t j = 0; j < 4; ++j) CHECK(ts.context[j] == doctest::Approx(same(0, j)));

  const auto h = random_tensor(5, 4, rng);
  const auto r = random_tensor(1, 4, rng);
  const auto result = grad_check(state, [&](bool backward) {
    const auto trace = attn.forward(state, h);
    if (backward) attn.backward(state, h, trace, r.values());
    double s = 0;
    for (std::size_t j = 0; j < 4; ++j) s += trace.context[j] * r[j];
    return s;
  });
  CHECK(result.max_relative_error < 1e-4);
}

TEST_CASE("checkpoint round trip") {
  Rng rng(9);
  Checkpoint ckpt;
  ckpt.config = {{"model", "bilstm"}, {"lookback", 2}};
  ckpt.labels = {"a", "b"};
  auto layer = Dense::create(ckpt.state, "head", 3, 2, Activation::softmax, rng);
  ckpt.state.step = 17;
  ckpt.state[layer.bias][1] = 1.0 / 3.0;

  std::stringstream buf;
  save_checkpoint(ckpt, buf);
  const auto back = load_checkpoint(buf);
  CHECK(back.config == ckpt.config);
  CHECK(back.labels == ckpt.labels);
  CHECK(back.state.step == 17);
  REQUIRE(back.state.size() == ckpt.state.size());
  for (ParamId p = 0; p < back.state.size(); ++p) {
    CHECK(back.state.name(p) == ckpt.state.name(p));
    CHECK(back.state[p].shape() == ckpt.state[p].shape());
    for (std::size_t i = 0; i < back.state[p].size(); ++i) CHECK(back.state[p][i] == ckpt.state[p][i]);
  }

  std::istringstream junk("{\"format\": 3}");
  CHECK_THROWS_AS(load_checkpoint(junk), ParseError);

  ModelState other;
  other.add("head.W", {2, 3});
  CHECK_THROWS_AS(assign_parameters(other, ckpt.state), ConfigError);
  CHECK(config_hash(ckpt.config).size() == 16);
}
