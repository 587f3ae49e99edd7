#include "hdsvar/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hdsvar::csv {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool try_parse_double(const std::string& token, double& out) {
  const std::string t = trimmed(token);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double v;
  if (!try_parse_double(token, v)) throw DataError(context + ": cannot parse number '" + token + "'");
  return v;
}

void write_matrix(std::ostream& out, const MatrixXd& values,
                  const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) out << ',';
      out << header[j];
    }
    out << '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const MatrixXd& values,
                       const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_matrix(out, values, header);
  if (!out) throw DataError("write to '" + path + "' failed");
}

MatrixXd read_matrix(std::istream& in, std::vector<std::string>* header_out,
                     const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t lineno = 0;
  std::size_t ncols = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) {
      if (first_content) continue;  // leading blank lines tolerated
      throw DataError(what + " line " + std::to_string(lineno) + ": blank line inside data");
    }
    const auto fields = split_fields(line);
    if (first_content) {
      first_content = false;
      bool all_numeric = true;
      for (const auto& f : fields) {
        double v;
        if (!try_parse_double(f, v)) {
          all_numeric = false;
          break;
        }
      }
      ncols = fields.size();
      if (!all_numeric) {
        for (const auto& f : fields) header.push_back(trimmed(f));
        continue;
      }
    }
    if (fields.size() != ncols)
      throw DataError(what + " line " + std::to_string(lineno) + ": expected " +
                      std::to_string(ncols) + " fields, found " + std::to_string(fields.size()));
    std::vector<double> row(ncols);
    for (std::size_t j = 0; j < ncols; ++j) {
      double v;
      if (!try_parse_double(fields[j], v))
        throw DataError(what + " line " + std::to_string(lineno) + ": field " +
                        std::to_string(j + 1) + " is not a number ('" + trimmed(fields[j]) + "')");
      if (!std::isfinite(v))
        throw DataError(what + " line " + std::to_string(lineno) + ": field " +
                        std::to_string(j + 1) + " is not finite");
      row[j] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(what + ": no data rows");
  MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ncols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  if (header_out) *header_out = std::move(header);
  return m;
}

MatrixXd read_matrix_file(const std::string& path, std::vector<std::string>* header_out) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_matrix(in, header_out, path);
}

TimeSeriesPanel read_panel(const std::string& path) {
  TimeSeriesPanel panel;
  panel.x = read_matrix_file(path, &panel.names);
  panel.validate();
  return panel;
}

void write_panel(const std::string& path, const TimeSeriesPanel& panel) {
  write_matrix_file(path, panel.x, panel.names);
}

}  // namespace hdsvar::csv
