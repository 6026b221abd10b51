#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "deconv/cli.hpp"
#include "deconv/error.hpp"

namespace deconv::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line, const char* column) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ValidationError("line " + std::to_string(line) + ": column " + column + " is not a finite number: '" +
                          std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

Sample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y") {
    throw ValidationError(path.string() + ": first line must be the header 'x,y'");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected two fields 'x,y'");
    }
    const double x = parse_field(row.substr(0, comma), line_no, "x");
    const double y = parse_field(row.substr(comma + 1), line_no, "y");
    if (x < -0.5 || x > 0.5) {
      throw ValidationError("line " + std::to_string(line_no) + ": x must lie in [-1/2, 1/2]");
    }
    if (!xs.empty() && !(x > xs.back())) {
      throw ValidationError("line " + std::to_string(line_no) + ": x must be strictly increasing");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.empty()) throw ValidationError(path.string() + ": no data rows");
  if (xs.size() % 2 == 0) {
    throw ValidationError(path.string() + ": the number of data rows must be odd (2n+1), got " +
                          std::to_string(xs.size()));
  }
  return Sample(DesignGrid::detect(xs), std::move(ys));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  rows_.back().reserve(header_.size());
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_double(v)); }

CsvTable& CsvTable::add(long long v) { return add(std::to_string(v)); }

CsvTable& CsvTable::add(std::string v) {
  if (rows_.empty()) throw Error("CsvTable::add before row()");
  if (rows_.back().size() == header_.size()) throw Error("CsvTable row has more fields than the header");
  rows_.back().push_back(std::move(v));
  return *this;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  const auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  emit(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw Error("CsvTable row has fewer fields than the header");
    emit(r);
  }
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace deconv::cli
