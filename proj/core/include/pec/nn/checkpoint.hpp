#pragma once

#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "pec/nn/state.hpp"

namespace pec::nn {

/// JSON container:
///   {"format": "pec-checkpoint/1", "config_hash", "labels", "config",
///    "step", "params": [{"name", "shape", "values"}]}
/// Doubles are written in shortest round-trip form.
struct Checkpoint {
  nlohmann::json config;
  std::vector<std::string> labels;
  ModelState state;
};

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
/// Throws ParseError on malformed input.
Checkpoint load_checkpoint(std::istream& in);

/// Copies parameter values from src into dst by name; shapes must agree.
/// Throws ConfigError on a missing name or shape mismatch.
void assign_parameters(ModelState& dst, const ModelState& src);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

}  // namespace pec::nn
