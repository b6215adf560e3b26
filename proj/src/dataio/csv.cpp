#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "cae/dataio.hpp"
#include "cae/errors.hpp"

namespace cae::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

bool is_missing(std::string_view cell) {
  if (cell.empty()) return true;
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan" || lower == "null" || lower == "?";
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

std::string format_double(double v, int significant_digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, significant_digits);
  return std::string(buf, res.ptr);
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::optional<std::size_t> label_idx;
  bool have_width = false;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t n_rows = 0;

  auto resolve_label_index = [&](const std::vector<std::string_view>& header) {
    if (!options.label_column) return;
    if (options.has_header) {
      const auto it = std::find(header.begin(), header.end(), std::string_view(*options.label_column));
      if (it == header.end()) {
        throw ParseError(source + ": label column '" + *options.label_column + "' not found in header");
      }
      label_idx = static_cast<std::size_t>(it - header.begin());
    } else {
      std::size_t idx = 0;
      const auto& s = *options.label_column;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(source + ": label column '" + s + "' must be a 0-based index when the file has no header");
      }
      label_idx = idx;
    }
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_cells(line);
    if (!have_width) {
      width = cells.size();
      have_width = true;
      if (options.has_header) {
        resolve_label_index(cells);
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (!label_idx || c != *label_idx) ds.feature_names.emplace_back(cells[c]);
        }
        continue;
      }
      resolve_label_index(cells);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!label_idx || c != *label_idx) ds.feature_names.push_back("f" + std::to_string(ds.feature_names.size()));
      }
      if (label_idx && *label_idx >= width) {
        throw ParseError(source + ": label column index " + std::to_string(*label_idx) + " outside " +
                         std::to_string(width) + " columns");
      }
    }
    if (cells.size() != width) {
      throw ParseError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(width));
    }
    bool skip_row = false;
    const std::size_t row_start = values.size();
    int label = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v)) {
        if (options.drop_missing && is_missing(cells[c])) {
          skip_row = true;
          break;
        }
        throw ParseError(source + ": non-numeric cell '" + std::string(cells[c]) + "' at line " +
                         std::to_string(line_no) + ", column " + std::to_string(c + 1));
      }
      if (label_idx && c == *label_idx) {
        if (v < 0 || v != std::floor(v) || v > 1e9) {
          throw ParseError(source + ": label '" + std::string(cells[c]) + "' at line " + std::to_string(line_no) +
                           " is not a non-negative integer");
        }
        label = static_cast<int>(v);
      } else {
        values.push_back(v);
      }
    }
    if (skip_row) {
      values.resize(row_start);
      continue;
    }
    if (label_idx) labels.push_back(label);
    ++n_rows;
  }
  const std::size_t n_features = ds.feature_names.size();
  if (n_rows == 0) throw ParseError(source + ": no data rows");
  ds.features = num::Matrix(n_rows, n_features, std::move(values));
  if (label_idx) ds.labels = std::move(labels);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file " + path.string());
  return parse_csv(in, options, path.string());
}

bool csv_looks_like_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    for (auto cell : split_cells(line)) {
      double v = 0.0;
      if (!parse_number(cell, v) && !is_missing(cell)) return true;
    }
    return false;
  }
  return false;
}

void save_csv(const std::filesystem::path& path, const num::Matrix& values, const std::vector<std::string>& names) {
  if (!names.empty() && names.size() != values.cols()) {
    throw ShapeError("save_csv: " + std::to_string(names.size()) + " column names for " + values.shape_string());
  }
  std::ostringstream out;
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  if (!names.empty()) out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace cae::io
