#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "taskdisc/param_bundle.hpp"

namespace taskdisc::nn {

using json = nlohmann::json;

struct CheckpointMeta {
  uint64_t seed = 0;
  int64_t step = 0;
  std::string config_hash;
  json extra = json::object();
};

// JSON manifest (names, shapes, frozen flags, seed, step) followed by the raw
// little-endian float payload of every tensor in manifest order. Reload is
// bit-exact.
void save_checkpoint(const ParamBundle& bundle, const CheckpointMeta& meta,
                     const std::string& path);

struct LoadedCheckpoint {
  ParamBundle bundle;
  CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace taskdisc::nn
