#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lcbench/nn/mlp.hpp"

namespace lcbench::nn {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary checkpoint: magic, format version, per-network layer sizes and
// activation tags, then parameters as little-endian 64-bit floats, each layer
// weights row-major followed by its bias. Round-trips are bit-exact.
void save_checkpoint(const std::string& path, const std::vector<const Mlp*>& nets);
std::vector<Mlp> load_checkpoint(const std::string& path);

}  // namespace lcbench::nn
