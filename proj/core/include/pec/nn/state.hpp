#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pec/nn/tensor.hpp"
#include "pec/rng.hpp"

namespace pec::nn {

using ParamId = std::size_t;

/// Named parameter tensors plus Adam moment slots and the step counter.
class ModelState {
 public:
  /// Adds a zero-initialised parameter. Names must be unique.
  ParamId add(std::string name, std::vector<std::size_t> shape);

  Tensor& operator[](ParamId id) { return params_.at(id); }
  const Tensor& operator[](ParamId id) const { return params_.at(id); }
  Tensor& get(std::string_view name);
  const Tensor& get(std::string_view name) const;
  std::optional<ParamId> find(std::string_view name) const;

  std::size_t size() const noexcept { return params_.size(); }
  const std::string& name(ParamId id) const { return names_.at(id); }
  std::size_t parameter_count() const;

  void zero_grad();

  std::uint64_t step = 0;
  /// Empty until the first optimiser step; then one per parameter.
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

 private:
  std::vector<Tensor> params_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, ParamId> index_;
};

/// uniform(-sqrt(1/fan_in), +sqrt(1/fan_in))
void init_uniform(Tensor& t, std::size_t fan_in, Rng& rng);

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update from the gradients stored on each
/// parameter. Throws NumericError naming the first parameter with a
/// non-finite gradient; nothing is updated in that case.
void adam_step(ModelState& state, const AdamOptions& options = {});

/// Multiplies every stored gradient by factor.
void scale_gradients(ModelState& state, double factor);

}  // namespace pec::nn
