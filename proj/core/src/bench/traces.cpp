#include "lcbench/bench/traces.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lcbench/common/csv.hpp"

namespace lcbench::bench {

namespace {

struct TraceRow {
  double step, ego_lane, ego_s, ego_v, ego_a, jerk, d_p, reward_total;
};

std::vector<TraceRow> read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace: " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[8];
    for (double& val : vals) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("malformed trace row: " + path);
      val = std::stod(cell);
    }
    rows.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7]});
  }
  return rows;
}

void write_series_csv(const std::string& path, const TraceSeries& s, const std::string& name) {
  common::CsvWriter csv(path, {"step", name});
  for (std::size_t i = 0; i < s.step.size(); ++i) {
    csv.begin_row();
    csv.field(s.step[i]);
    csv.field(s.value[i]);
    csv.end_row();
  }
}

}  // namespace

void write_svg_chart(const std::string& path, const TraceSeries& series,
                     const std::string& title, const std::string& y_label) {
  if (series.step.empty()) throw std::invalid_argument("write_svg_chart: empty series");
  const double width = 720, height = 360, ml = 60, mr = 15, mt = 30, mb = 40;
  const double px = width - ml - mr, py = height - mt - mb;

  const auto [xmin_it, xmax_it] = std::minmax_element(series.step.begin(), series.step.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(series.value.begin(), series.value.end());
  double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * px; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * py; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  // axis labels
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << common::format_double(std::round(yv * 100.0) / 100.0) << "</text>\n";
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << common::format_double(std::round(xv)) << "</text>\n";
  }
  out << "<text x=\"14\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 14 "
      << height / 2 << ")\">" << y_label << "</text>\n";
  out << "<text x=\"" << ml + px / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">step</text>\n";
  // polyline
  out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i < series.step.size(); ++i) {
    out << sx(series.step[i]) << ',' << sy(series.value[i]);
    if (i + 1 < series.step.size()) out << ' ';
  }
  out << "\"/>\n</svg>\n";
}

std::vector<std::string> export_traces(const std::string& in_dir, const std::string& out_dir,
                                       double lane_width) {
  namespace fs = std::filesystem;
  std::vector<fs::path> traces;
  if (fs::is_directory(in_dir)) {
    for (const auto& entry : fs::directory_iterator(in_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("episode_", 0) == 0 && entry.path().extension() == ".csv")
        traces.push_back(entry.path());
    }
  }
  if (traces.empty()) throw std::runtime_error("no episode traces found under " + in_dir);
  std::sort(traces.begin(), traces.end());
  fs::create_directories(out_dir);

  std::vector<std::string> written;
  for (const auto& trace_path : traces) {
    const auto rows = read_trace(trace_path.string());
    const std::string stem = trace_path.stem().string();  // episode_0000

    struct Spec {
      const char* name;
      const char* label;
      double (*pick)(const TraceRow&, double);
    };
    const Spec specs[] = {
        {"speed", "speed (m/s)", [](const TraceRow& r, double) { return r.ego_v; }},
        {"acceleration", "acceleration (m/s^2)", [](const TraceRow& r, double) { return r.ego_a; }},
        {"jerk", "jerk (m/s^3)", [](const TraceRow& r, double) { return r.jerk; }},
        {"lateral", "lateral position (m)",
         [](const TraceRow& r, double w) { return r.ego_lane * w; }},
        {"gap", "gap to leader (m)", [](const TraceRow& r, double) { return r.d_p; }},
    };
    for (const auto& spec : specs) {
      TraceSeries s;
      for (const auto& r : rows) {
        s.step.push_back(r.step);
        s.value.push_back(spec.pick(r, lane_width));
      }
      const std::string base = out_dir + "/" + stem + "_" + spec.name;
      write_series_csv(base + ".csv", s, spec.name);
      write_svg_chart(base + ".svg", s, stem + " " + spec.name, spec.label);
      written.push_back(base + ".csv");
      written.push_back(base + ".svg");
    }
  }
  return written;
}

}  // namespace lcbench::bench
