#include "pec/nn/state.hpp"

#include <cmath>

#include "pec/error.hpp"

namespace pec::nn {

ParamId ModelState::add(std::string name, std::vector<std::size_t> shape) {
  const ParamId id = params_.size();
  auto [it, inserted] = index_.emplace(name, id);
  if (!inserted) throw ConfigError("duplicate parameter name \"" + name + "\"");
  params_.emplace_back(std::move(shape));
  names_.push_back(std::move(name));
  return id;
}

std::optional<ParamId> ModelState::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Tensor& ModelState::get(std::string_view name) {
  auto id = find(name);
  if (!id) throw ConfigError("no parameter named \"" + std::string(name) + "\"");
  return params_[*id];
}

const Tensor& ModelState::get(std::string_view name) const {
  auto id = find(name);
  if (!id) throw ConfigError("no parameter named \"" + std::string(name) + "\"");
  return params_[*id];
}

std::size_t ModelState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void ModelState::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void init_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in == 0 ? 1 : fan_in));
  for (auto& v : t.values()) v = rng.uniform(-bound, bound);
}

void adam_step(ModelState& state, const AdamOptions& options) {
  for (ParamId id = 0; id < state.size(); ++id) {
    for (double g : state[id].grad()) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter \"" + state.name(id) + "\"");
    }
  }
  if (state.first_moment.size() != state.size()) {
    state.first_moment.clear();
    state.second_moment.clear();
    for (ParamId id = 0; id < state.size(); ++id) {
      state.first_moment.emplace_back(state[id].shape());
      state.second_moment.emplace_back(state[id].shape());
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(options.beta1, t);
  const double c2 = 1.0 - std::pow(options.beta2, t);
  for (ParamId id = 0; id < state.size(); ++id) {
    auto values = state[id].values();
    auto grad = state[id].grad();
    auto m = state.first_moment[id].values();
    auto v = state.second_moment[id].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * grad[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      values[i] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
    }
  }
}

void scale_gradients(ModelState& state, double factor) {
  for (ParamId id = 0; id < state.size(); ++id)
    for (auto& g : state[id].grad()) g *= factor;
}

}  // namespace pec::nn
