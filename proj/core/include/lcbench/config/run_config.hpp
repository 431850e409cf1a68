#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lcbench/mpc/mpc.hpp"
#include "lcbench/pasac/types.hpp"
#include "lcbench/sim/types.hpp"

namespace lcbench::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value document covering the simulator, agent, MPC, and harness
// options. Every key is optional and defaults to the values below; unknown
// keys are rejected with a diagnostic naming the key. serialize() emits the
// canonical form (fixed key order), a fixed point of parse -> serialize.
struct RunConfig {
  sim::SimConfig sim;
  pasac::PasacHyper pasac;
  mpc::MpcConfig mpc;  // weights/setpoints/bounds mirror `sim`; see mpc_config()
  std::vector<double> densities{0.05, 0.11, 0.20};
  int episodes = 100;
  int jobs = 0;  // 0 = machine parallelism

  RunConfig() { mpc = mpc::MpcConfig::from_sim(sim); }

  // The effective MPC configuration: shared weights, setpoints and control
  // bounds come from the simulator section, the rest from the mpc keys.
  mpc::MpcConfig mpc_config() const;

  // Throws ConfigError naming the offending key.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  std::string serialize() const;
  static RunConfig parse(const std::string& text);
  static RunConfig load_file(const std::string& path);  // throws on unreadable

  static const std::vector<std::string>& keys();
  std::string get(const std::string& key) const;
};

}  // namespace lcbench::config
