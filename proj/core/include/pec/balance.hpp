#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pec/labels.hpp"
#include "pec/reconstruct.hpp"

namespace pec {

enum class BalanceStrategy { none, cw, sw, os };

std::string_view to_string(BalanceStrategy s);
BalanceStrategy parse_balance(std::string_view text);

/// What |L| means in the weight formulas.
///   total_samples - sum of class counts (default)
///   num_classes   - size of the label set
enum class WeightBasis { total_samples, num_classes };

std::string_view to_string(WeightBasis b);
WeightBasis parse_weight_basis(std::string_view text);

struct ClassWeights {
  std::vector<double> weights;
  BalanceStrategy strategy = BalanceStrategy::none;
  double mu = 0.15;
  /// Labels with zero training count.
  std::vector<LabelId> zero_count;

  double operator[](LabelId label) const { return weights.at(label); }
  std::size_t size() const noexcept { return weights.size(); }
};

ClassWeights uniform_weights(std::size_t num_labels, BalanceStrategy strategy = BalanceStrategy::none);

/// weight(l) = |L| / count(l). Zero-count classes get weight 0 and are
/// listed in zero_count. Throws ConfigError on an all-zero distribution.
ClassWeights count_weights(const LabelDistribution& dist, WeightBasis basis = WeightBasis::total_samples);

/// weight(l) = max(ln(mu * |L| / count(l)), 1). Zero-count classes sit at
/// the floor and are listed in zero_count. Throws ConfigError if mu <= 0.
ClassWeights smooth_weights(const LabelDistribution& dist, double mu = 0.15,
                            WeightBasis basis = WeightBasis::total_samples);

/// Weights for a strategy; none and os give all ones.
ClassWeights weights_for(BalanceStrategy strategy, const LabelDistribution& dist, double mu = 0.15,
                         WeightBasis basis = WeightBasis::total_samples);

/// Tops every present class up to the majority count by drawing its own
/// samples with replacement. Originals come first, in input order, followed
/// by draws grouped by label id. Throws ConfigError on an empty set.
SampleSet oversample(const SampleSet& set, std::uint64_t seed);

}  // namespace pec
