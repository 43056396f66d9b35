#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace logcave::cli {

/// Malformed input file; maps to exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;
};

/// Comma-separated numbers, one record per line. A first line that does not
/// parse as numbers is taken as a header. Blank lines are skipped.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Shortest text that reads back to the same double (at most 17 significant
/// digits), independent of the locale.
std::string format_number(double v);

void write_csv(std::ostream& out, const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& header = {});

}  // namespace logcave::cli
