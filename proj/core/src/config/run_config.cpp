#include "lcbench/config/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "lcbench/common/csv.hpp"

namespace lcbench::config {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  double out{};
  const auto* begin = v.data();
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("invalid value for key '" + key + "': " + v);
  return out;
}

long parse_int(const std::string& key, const std::string& v) {
  long out{};
  const auto* begin = v.data();
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("invalid value for key '" + key + "': " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("invalid value for key '" + key + "': " + v);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, cell));
  if (out.empty()) throw ConfigError("invalid value for key '" + key + "': " + v);
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += common::format_double(v[i]);
  }
  return out;
}

struct Entry {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define LC_DOUBLE(name, field)                                                       \
  Entry{name, [](const RunConfig& c) { return common::format_double(c.field); },     \
        [](RunConfig& c, const std::string& v) { c.field = parse_double(name, v); }}
#define LC_INT(name, field)                                                          \
  Entry{name, [](const RunConfig& c) { return std::to_string(c.field); },            \
        [](RunConfig& c, const std::string& v) {                                     \
          c.field = static_cast<decltype(c.field)>(parse_int(name, v));              \
        }}
#define LC_BOOL(name, field)                                                         \
  Entry{name, [](const RunConfig& c) { return c.field ? "true" : "false"; },         \
        [](RunConfig& c, const std::string& v) { c.field = parse_bool(name, v); }}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      LC_DOUBLE("road_length", sim.road_length),
      LC_INT("lane_count", sim.lane_count),
      LC_DOUBLE("lane_width", sim.lane_width),
      LC_DOUBLE("dt", sim.dt),
      LC_DOUBLE("a_min", sim.a_min),
      LC_DOUBLE("a_max", sim.a_max),
      LC_DOUBLE("v_safe", sim.v_safe),
      LC_DOUBLE("d_safe", sim.d_safe),
      LC_DOUBLE("r_collision", sim.r_collision),
      LC_DOUBLE("w0", sim.w0),
      LC_DOUBLE("w1", sim.w1),
      LC_DOUBLE("w2", sim.w2),
      LC_DOUBLE("w3", sim.w3),
      LC_DOUBLE("w4", sim.w4),
      LC_DOUBLE("flow_density", sim.flow_density),
      LC_DOUBLE("sensing_range", sim.sensing_range),
      LC_DOUBLE("vehicle_length", sim.vehicle_length),
      LC_DOUBLE("ego_init_speed", sim.ego_init_speed),
      LC_DOUBLE("leader_init_speed", sim.leader_init_speed),
      LC_DOUBLE("spawn_buffer", sim.spawn_buffer),
      LC_INT("max_steps", sim.max_steps),
      LC_DOUBLE("gamma", pasac.gamma),
      LC_DOUBLE("tau", pasac.tau),
      LC_DOUBLE("alpha", pasac.alpha),
      LC_DOUBLE("actor_lr", pasac.actor_lr),
      LC_DOUBLE("critic_lr", pasac.critic_lr),
      LC_INT("batch_size", pasac.batch_size),
      LC_INT("learning_starts", pasac.learning_starts),
      LC_INT("total_steps", pasac.total_steps),
      LC_INT("buffer_capacity", pasac.buffer_capacity),
      LC_INT("hidden_units", pasac.hidden_units),
      LC_INT("hidden_layers", pasac.hidden_layers),
      LC_INT("horizon", mpc.horizon),
      LC_DOUBLE("ts", mpc.ts),
      LC_DOUBLE("j_th", mpc.j_th),
      LC_DOUBLE("k_p", mpc.k_p),
      LC_DOUBLE("barrier_weight", mpc.barrier_weight),
      LC_DOUBLE("rear_critical_gap", mpc.rear_critical_gap),
      LC_INT("solver_seed_levels", mpc.seed_levels),
      LC_INT("solver_sweeps", mpc.sweeps),
      LC_DOUBLE("solver_init_step", mpc.init_step),
      LC_DOUBLE("solver_tol", mpc.tol),
      LC_BOOL("mpc_literal_matrix", mpc.literal_matrix),
      Entry{"densities",
            [](const RunConfig& c) { return format_list(c.densities); },
            [](RunConfig& c, const std::string& v) { c.densities = parse_list("densities", v); }},
      LC_INT("episodes", episodes),
      LC_INT("jobs", jobs),
  };
  return table;
}

#undef LC_DOUBLE
#undef LC_INT
#undef LC_BOOL

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (key == e.key) {
      e.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
  for (const auto& e : entries()) {
    if (key == e.key) return e.get(*this);
  }
  throw ConfigError("unknown config key '" + key + "'");
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : entries()) out.emplace_back(e.key);
    return out;
  }();
  return names;
}

mpc::MpcConfig RunConfig::mpc_config() const {
  mpc::MpcConfig out = mpc::MpcConfig::from_sim(sim);
  out.horizon = mpc.horizon;
  out.ts = mpc.ts;
  out.j_th = mpc.j_th;
  out.k_p = mpc.k_p;
  out.barrier_weight = mpc.barrier_weight;
  out.rear_critical_gap = mpc.rear_critical_gap;
  out.seed_levels = mpc.seed_levels;
  out.sweeps = mpc.sweeps;
  out.init_step = mpc.init_step;
  out.tol = mpc.tol;
  out.literal_matrix = mpc.literal_matrix;
  return out;
}

void RunConfig::validate() const {
  try {
    sim.validate();
    pasac.validate();
    mpc_config().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (episodes <= 0) throw ConfigError("invalid value for key 'episodes': must be positive");
  if (jobs < 0) throw ConfigError("invalid value for key 'jobs': must be nonnegative");
  for (double d : densities)
    if (d < 0 || d * sim.dt >= 1)
      throw ConfigError("invalid value for key 'densities': entries must satisfy d*dt < 1");
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& e : entries()) {
    out += e.key;
    out += " = ";
    out += e.get(*this);
    out += '\n';
  }
  return out;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    // strip comments and whitespace
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cfg.set(key, value);
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace lcbench::config
