#include "pec/nn/checkpoint.hpp"

#include <cstdint>
#include <cstdio>

#include "pec/error.hpp"

namespace pec::nn {

namespace {
constexpr const char* kFormat = "pec-checkpoint/1";
}

std::string config_hash(const nlohmann::json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["config_hash"] = config_hash(ckpt.config);
  j["labels"] = ckpt.labels;
  j["config"] = ckpt.config;
  j["step"] = ckpt.state.step;
  auto params = nlohmann::ordered_json::array();
  for (ParamId id = 0; id < ckpt.state.size(); ++id) {
    nlohmann::ordered_json p;
    p["name"] = ckpt.state.name(id);
    p["shape"] = ckpt.state[id].shape();
    p["values"] = std::vector<double>(ckpt.state[id].values().begin(), ckpt.state[id].values().end());
    params.push_back(std::move(p));
  }
  j["params"] = std::move(params);
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw ParseError(1, "unsupported checkpoint format");
    Checkpoint ckpt;
    ckpt.config = j.at("config");
    ckpt.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.at("config_hash").get<std::string>() != config_hash(ckpt.config)) {
      throw ParseError(1, "checkpoint config hash mismatch");
    }
    ckpt.state.step = j.at("step").get<std::uint64_t>();
    for (const auto& p : j.at("params")) {
      auto id = ckpt.state.add(p.at("name").get<std::string>(), p.at("shape").get<std::vector<std::size_t>>());
      auto values = p.at("values").get<std::vector<double>>();
      auto dst = ckpt.state[id].values();
      if (values.size() != dst.size()) throw ParseError(1, "parameter value count does not match its shape");
      std::copy(values.begin(), values.end(), dst.begin());
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("malformed checkpoint: ") + e.what());
  }
}

void assign_parameters(ModelState& dst, const ModelState& src) {
  for (ParamId id = 0; id < dst.size(); ++id) {
    auto found = src.find(dst.name(id));
    if (!found) throw ConfigError("checkpoint lacks parameter \"" + dst.name(id) + "\"");
    const auto& from = src[*found];
    if (!from.same_shape(dst[id])) throw ConfigError("shape mismatch for parameter \"" + dst.name(id) + "\"");
    std::copy(from.values().begin(), from.values().end(), dst[id].values().begin());
  }
  dst.step = src.step;
}

}  // namespace pec::nn
