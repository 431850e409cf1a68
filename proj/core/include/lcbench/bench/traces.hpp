#pragma once

#include <string>
#include <vector>

namespace lcbench::bench {

struct TraceSeries {
  std::vector<double> step;
  std::vector<double> value;
};

// Reads the per-step episode traces under in_dir (episode_*.csv) and emits,
// per episode, one time-series CSV and one SVG line chart for each of:
// speed, acceleration, jerk, lateral position, gap to leader. Returns the
// paths written. Throws when no traces are found.
std::vector<std::string> export_traces(const std::string& in_dir, const std::string& out_dir,
                                       double lane_width);

void write_svg_chart(const std::string& path, const TraceSeries& series,
                     const std::string& title, const std::string& y_label);

}  // namespace lcbench::bench
