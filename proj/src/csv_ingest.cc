// Copyright 2026 The ESFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "esfl/datasets.h"
#include "esfl/error.h"

namespace esfl {

namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// RFC 4180 fields: commas separate, double quotes wrap, "" escapes a quote.
std::vector<std::string> SplitCsvLine(const std::string& line, size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(Trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::kRow, "line " + std::to_string(line_no) + ": unterminated quote");
  }
  out.push_back(Trim(cur));
  return out;
}

[[noreturn]] void RowError(size_t line, const std::string& msg) {
  throw Error(ErrorCode::kRow, "line " + std::to_string(line) + ": " + msg);
}

std::optional<double> ParseNumber(const std::string& cell, std::string_view column,
                                  size_t line) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    RowError(line, "column \"" + std::string(column) + "\": \"" + cell +
                       "\" is not a finite number");
  }
  return v;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string QuoteIfNeeded(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

int64_t DateOrdinal(std::string_view iso) {
  auto bad = [&]() -> int64_t {
    throw Error(ErrorCode::kRow, "\"" + std::string(iso) + "\" is not an ISO-8601 date");
  };
  if (iso.size() < 10 || iso[4] != '-' || iso[7] != '-') return bad();
  if (iso.size() > 10 && iso[10] != 'T' && iso[10] != ' ') return bad();
  auto num = [&](size_t pos, size_t len) -> int {
    int v = 0;
    auto [ptr, ec] = std::from_chars(iso.data() + pos, iso.data() + pos + len, v);
    if (ec != std::errc() || ptr != iso.data() + pos + len) bad();
    return v;
  };
  const int y = num(0, 4);
  const unsigned m = static_cast<unsigned>(num(5, 2));
  const unsigned d = static_cast<unsigned>(num(8, 2));
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m < 1 || m > 12) return bad();
  const unsigned dim = kDays[m - 1] + ((m == 2 && leap) ? 1 : 0);
  if (d < 1 || d > dim) return bad();
  // days_from_civil (H. Hinnant).
  const int yy = y - (m <= 2 ? 1 : 0);
  const int era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

std::vector<RawRecord> ParseCsv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!Trim(line).empty()) {
      header = SplitCsvLine(line, line_no);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorCode::kSchema, "CSV has no header row");

  std::map<std::string, size_t> col;
  for (size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);
  auto require = [&](const std::string& name, std::string_view role) {
    auto it = col.find(name);
    if (it == col.end()) {
      throw Error(ErrorCode::kSchema, "missing column \"" + name + "\" (" +
                                          std::string(role) + ")");
    }
    return it->second;
  };
  const size_t c_label = require(schema.client_label, "client_label");
  const size_t c_lat = require(schema.latitude, "latitude");
  const size_t c_lon = require(schema.longitude, "longitude");
  const size_t c_date = require(schema.ref_date, "ref_date");
  const size_t c_target = require(schema.target, "target");

  std::vector<std::pair<long, size_t>> level_cols;
  std::vector<size_t> feature_cols;
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (!schema.level_prefix.empty() && h.starts_with(schema.level_prefix)) {
      const std::string rest = h.substr(schema.level_prefix.size());
      long n = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
      if (ec == std::errc() && ptr == rest.data() + rest.size()) {
        level_cols.emplace_back(n, i);
        continue;
      }
    }
    if (!schema.feature_prefix.empty() && h.starts_with(schema.feature_prefix)) {
      feature_cols.push_back(i);
    }
  }
  std::sort(level_cols.begin(), level_cols.end());

  std::vector<RawRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells = SplitCsvLine(line, line_no);
    if (cells.size() != header.size()) {
      RowError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    RawRecord r;
    r.source_line = line_no;
    if (cells[c_label].empty()) RowError(line_no, "empty client label");
    r.spatial.hierarchy_path.push_back(cells[c_label]);
    for (const auto& [n, idx] : level_cols) {
      if (cells[idx].empty()) RowError(line_no, "empty hierarchy cell \"" + header[idx] + "\"");
      r.spatial.hierarchy_path.push_back(cells[idx]);
    }
    auto lat = ParseNumber(cells[c_lat], header[c_lat], line_no);
    auto lon = ParseNumber(cells[c_lon], header[c_lon], line_no);
    if (!lat || !lon) RowError(line_no, "missing coordinates");
    r.spatial.latitude = *lat;
    r.spatial.longitude = *lon;
    try {
      r.spatial.Validate();
      DateOrdinal(cells[c_date]);
    } catch (const Error& e) {
      RowError(line_no, e.what());
    }
    r.ref_date = cells[c_date];
    r.target = ParseNumber(cells[c_target], header[c_target], line_no);
    for (size_t idx : feature_cols) {
      r.features.push_back(ParseNumber(cells[idx], header[idx], line_no));
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<RawRecord> IngestCsv(const std::filesystem::path& path,
                                 const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseCsv(in, schema);
}

void WriteCsv(std::ostream& out, std::span<const RawRecord> records) {
  const size_t levels = records.empty() ? 0 : records.front().spatial.hierarchy_path.size() - 1;
  const size_t features = records.empty() ? 0 : records.front().features.size();
  out << "client_label";
  for (size_t l = 1; l <= levels; ++l) out << ",level_" << l;
  out << ",latitude,longitude,ref_date,target";
  for (size_t f = 0; f < features; ++f) out << ",feature_" << f;
  out << '\n';
  auto cell = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  for (const RawRecord& r : records) {
    out << QuoteIfNeeded(r.spatial.hierarchy_path.front());
    for (size_t l = 1; l <= levels; ++l) out << ',' << QuoteIfNeeded(r.spatial.hierarchy_path.at(l));
    out << ',' << FormatDouble(r.spatial.latitude) << ',' << FormatDouble(r.spatial.longitude)
        << ',' << r.ref_date << ',' << cell(r.target);
    for (size_t f = 0; f < features; ++f) out << ',' << cell(r.features.at(f));
    out << '\n';
  }
}

}  // namespace esfl
