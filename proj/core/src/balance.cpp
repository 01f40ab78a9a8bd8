#include "pec/balance.hpp"

#include <algorithm>
#include <cmath>

#include "pec/error.hpp"
#include "pec/rng.hpp"

namespace pec {

std::string_view to_string(BalanceStrategy s) {
  switch (s) {
    case BalanceStrategy::none: return "none";
    case BalanceStrategy::cw: return "cw";
    case BalanceStrategy::sw: return "sw";
    case BalanceStrategy::os: return "os";
  }
  return "none";
}

BalanceStrategy parse_balance(std::string_view text) {
  if (text == "none") return BalanceStrategy::none;
  if (text == "cw") return BalanceStrategy::cw;
  if (text == "sw") return BalanceStrategy::sw;
  if (text == "os") return BalanceStrategy::os;
  throw ConfigError("balance must be one of none, cw, sw, os; got \"" + std::string(text) + "\"");
}

std::string_view to_string(WeightBasis b) {
  return b == WeightBasis::total_samples ? "total" : "classes";
}

WeightBasis parse_weight_basis(std::string_view text) {
  if (text == "total") return WeightBasis::total_samples;
  if (text == "classes") return WeightBasis::num_classes;
  throw ConfigError("weight basis must be total or classes; got \"" + std::string(text) + "\"");
}

ClassWeights uniform_weights(std::size_t num_labels, BalanceStrategy strategy) {
  ClassWeights cw;
  cw.weights.assign(num_labels, 1.0);
  cw.strategy = strategy;
  return cw;
}

namespace {

double basis_size(const LabelDistribution& dist, WeightBasis basis) {
  return basis == WeightBasis::total_samples ? static_cast<double>(dist.total())
                                             : static_cast<double>(dist.size());
}

}  // namespace

ClassWeights count_weights(const LabelDistribution& dist, WeightBasis basis) {
  if (dist.total() <= 0) throw ConfigError("count weights need at least one labelled sample");
  const double size = basis_size(dist, basis);
  ClassWeights cw;
  cw.strategy = BalanceStrategy::cw;
  cw.weights.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.counts[i] <= 0) {
      cw.weights[i] = 0.0;
      cw.zero_count.push_back(static_cast<LabelId>(i));
    } else {
      cw.weights[i] = size / static_cast<double>(dist.counts[i]);
    }
  }
  return cw;
}

ClassWeights smooth_weights(const LabelDistribution& dist, double mu, WeightBasis basis) {
  if (!(mu > 0.0)) throw ConfigError("mu must be > 0");
  if (dist.total() <= 0) throw ConfigError("smooth weights need at least one labelled sample");
  const double size = basis_size(dist, basis);
  ClassWeights cw;
  cw.strategy = BalanceStrategy::sw;
  cw.mu = mu;
  cw.weights.resize(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.counts[i] <= 0) {
      cw.weights[i] = 1.0;
      cw.zero_count.push_back(static_cast<LabelId>(i));
    } else {
      cw.weights[i] = std::max(std::log(mu * size / static_cast<double>(dist.counts[i])), 1.0);
    }
  }
  return cw;
}

ClassWeights weights_for(BalanceStrategy strategy, const LabelDistribution& dist, double mu, WeightBasis basis) {
  switch (strategy) {
    case BalanceStrategy::cw: return count_weights(dist, basis);
    case BalanceStrategy::sw: return smooth_weights(dist, mu, basis);
    case BalanceStrategy::none:
    case BalanceStrategy::os: return uniform_weights(dist.size(), strategy);
  }
  return uniform_weights(dist.size(), strategy);
}

SampleSet oversample(const SampleSet& set, std::uint64_t seed) {
  if (set.empty()) throw ConfigError("cannot oversample an empty sample set");
  const std::size_t k = set.label_set.size();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < set.size(); ++i) members.at(set.samples[i].target_emotion).push_back(i);

  std::size_t majority = 0;
  for (const auto& m : members) majority = std::max(majority, m.size());

  SampleSet out = set;
  Rng rng(seed);
  for (std::size_t label = 0; label < k; ++label) {
    const auto& pool = members[label];
    if (pool.empty()) continue;
    for (std::size_t n = pool.size(); n < majority; ++n) {
      out.samples.push_back(set.samples[pool[rng.index(pool.size())]]);
    }
  }
  return out;
}

}  // namespace pec
