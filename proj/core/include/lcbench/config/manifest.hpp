#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lcbench/config/run_config.hpp"

namespace lcbench::config {

// Writes a JSON run manifest: command, seed, full config snapshot, and a
// content hash per output file. A run is reproducible from its manifest
// alone.
void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& cfg, std::uint64_t seed,
                    const std::map<std::string, std::string>& output_hashes);

}  // namespace lcbench::config
