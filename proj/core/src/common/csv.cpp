#include "lcbench/common/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace lcbench::common {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

CsvWriter::~CsvWriter() { flush(); }

void CsvWriter::begin_row() {
  row_started_ = true;
  first_field_ = true;
}

void CsvWriter::field(const std::string& v) {
  if (!first_field_) out_ << ',';
  out_ << v;
  first_field_ = false;
}

void CsvWriter::field(double v) { field(format_double(v)); }

void CsvWriter::field(long v) { field(std::to_string(v)); }

void CsvWriter::blank_field() { field(std::string{}); }

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

void CsvWriter::flush() { out_.flush(); }

}  // namespace lcbench::common
