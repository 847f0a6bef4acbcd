#include "hardylab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace hardylab {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << g17(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_field_csv(const std::string& path, const SolutionField& field) {
  std::vector<std::vector<double>> rows;
  rows.reserve(field.values.size());
  for (int j = 0; j < field.grid.jr(); ++j) {
    for (int i = 0; i < field.grid.m(); ++i) {
      rows.push_back({field.grid.r[j], field.grid.angular.phi[i], field.at(j, i)});
    }
  }
  write_csv(path, {"r", "phi", "value"}, rows);
}

std::string resolve_outdir(const std::string& flag_value) {
  std::string dir = flag_value;
  if (dir.empty()) {
    if (const char* env = std::getenv("HARDYLAB_OUTDIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace hardylab
