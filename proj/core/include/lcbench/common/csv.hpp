#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace lcbench::common {

// Shortest round-trip decimal form; identical input bits give identical text.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  void begin_row();
  void field(const std::string& v);
  void field(double v);
  void field(long v);
  void field(int v) { field(static_cast<long>(v)); }
  void field(bool v) { field(static_cast<long>(v ? 1 : 0)); }
  void blank_field();
  void end_row();
  void flush();

 private:
  std::ofstream out_;
  bool row_started_ = false;
  bool first_field_ = true;
};

}  // namespace lcbench::common
