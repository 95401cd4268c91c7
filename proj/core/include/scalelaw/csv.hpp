#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace scalelaw::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

Table read_file(const std::filesystem::path& path);
Table parse(const std::string& text);

void write_file(const std::filesystem::path& path, const Table& table);
std::string format(const Table& table);

/// Shortest round-trip decimal formatting for doubles ("%.17g" trimmed).
std::string num(double v);

}  // namespace scalelaw::csv
