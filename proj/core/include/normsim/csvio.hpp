#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace normsim {

// Round-trip-exact floating point text (shortest form).
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter() = default;
  CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append = false);
  void row(const std::vector<std::string>& cells);
  void flush();
  bool is_open() const { return out_.is_open(); }

 private:
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Throws std::runtime_error when the file cannot be read.
CsvTable read_csv(const std::string& path);

}  // namespace normsim
