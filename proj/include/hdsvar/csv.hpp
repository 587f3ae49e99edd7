#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdsvar/types.hpp"

namespace hdsvar::csv {

// Shortest decimal string that round-trips to the same double
// (std::to_chars; locale-independent, byte-stable across reruns).
std::string format_double(double value);

// Parses one double; throws DataError naming `context` on failure.
double parse_double(const std::string& token, const std::string& context);

// Comma-separated numeric matrix. `header` may be empty (no header row written).
void write_matrix(std::ostream& out, const MatrixXd& values,
                  const std::vector<std::string>& header);
void write_matrix_file(const std::string& path, const MatrixXd& values,
                       const std::vector<std::string>& header);

// Reads a numeric CSV. The first row is treated as a header when any of its
// fields does not parse as a number. Rows must be rectangular; empty fields and
// non-finite values are rejected with the offending line number.
MatrixXd read_matrix(std::istream& in, std::vector<std::string>* header_out,
                     const std::string& what);
MatrixXd read_matrix_file(const std::string& path, std::vector<std::string>* header_out);

TimeSeriesPanel read_panel(const std::string& path);
void write_panel(const std::string& path, const TimeSeriesPanel& panel);

}  // namespace hdsvar::csv
