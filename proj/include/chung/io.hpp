#pragma once

#include <string>
#include <vector>

namespace chung {

/// 17 significant digits; non-finite values as inf, -inf, nan.
std::string fmt17(double v);
/// Inverse of fmt17. Throws std::invalid_argument on malformed input.
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace chung
