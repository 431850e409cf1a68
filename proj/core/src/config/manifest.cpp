#include "lcbench/config/manifest.hpp"

#include <fstream>
#include <json.hpp>

#include "lcbench/version.hpp"

namespace lcbench::config {

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& cfg, std::uint64_t seed,
                    const std::map<std::string, std::string>& output_hashes) {
  nlohmann::ordered_json j;
  j["tool"] = "lcbench";
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = seed;
  nlohmann::ordered_json c;
  for (const auto& key : RunConfig::keys()) c[key] = cfg.get(key);
  j["config"] = c;
  nlohmann::ordered_json outs;
  for (const auto& [file, hash] : output_hashes) outs[file] = hash;
  j["outputs"] = outs;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace lcbench::config
