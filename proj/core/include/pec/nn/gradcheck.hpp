#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "pec/nn/state.hpp"

namespace pec::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// `loss(with_backward)` must return the scalar loss for the current
/// parameter values and, when with_backward is true, accumulate analytic
/// gradients into the state. Every element of every parameter is compared
/// against a central difference with step h. Relative error is
/// |a - n| / max(|a|, |n|, floor).
GradCheckResult grad_check(ModelState& state, const std::function<double(bool with_backward)>& loss, double h = 1e-5,
                           double floor = 1e-6);

}  // namespace pec::nn
