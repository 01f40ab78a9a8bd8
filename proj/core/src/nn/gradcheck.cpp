#include "pec/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pec::nn {

GradCheckResult grad_check(ModelState& state, const std::function<double(bool)>& loss, double h, double floor) {
  state.zero_grad();
  for (ParamId id = 0; id < state.size(); ++id) state[id].grad();
  loss(true);

  std::vector<std::vector<double>> analytic;
  analytic.reserve(state.size());
  for (ParamId id = 0; id < state.size(); ++id) {
    auto g = state[id].grad();
    analytic.emplace_back(g.begin(), g.end());
  }

  GradCheckResult result;
  for (ParamId id = 0; id < state.size(); ++id) {
    auto values = state[id].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss(false);
      values[i] = saved - h;
      const double down = loss(false);
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[id][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = state.name(id);
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace pec::nn
