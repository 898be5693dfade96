#pragma once

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal::io {

/// Shortest decimal text with at most 17 significant digits, '.' separator.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Writes through a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw InvalidArgument("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidArgument("rename failed: " + path.string() + ": " + ec.message());
}

/// Column table with '#' comment lines above the header and below the rows.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> footer;

  std::string str() const {
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    for (std::size_t k = 0; k < columns.size(); ++k) out += (k ? "," : "") + columns[k];
    out += "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) out += (k ? "," : "") + format_double(r[k]);
      out += "\n";
    }
    for (const auto& c : footer) out += "# " + c + "\n";
    return out;
  }
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_atomic(path, t.str()); }

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

/// Two-column (x, value) table; '#' lines and a non-numeric header row are skipped.
inline std::vector<std::pair<double, double>> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read table " + path.string());
  std::vector<std::pair<double, double>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
    const char* p = line.data();
    const char* end = p + line.size();
    double v[2];
    bool ok = true;
    for (double& x : v) {
      while (p < end && *p == ' ') ++p;
      const auto r = std::from_chars(p, end, x);
      if (r.ec != std::errc()) {
        ok = false;
        break;
      }
      p = r.ptr;
    }
    if (!ok) {
      if (out.empty()) continue;  // header
      throw InvalidArgument("malformed table row: " + line);
    }
    out.emplace_back(v[0], v[1]);
  }
  if (out.size() < 2) throw InvalidArgument("table needs at least two rows: " + path.string());
  for (std::size_t k = 1; k < out.size(); ++k)
    if (!(out[k].first > out[k - 1].first)) throw InvalidArgument("table x column must increase strictly");
  return out;
}

/// Piecewise-linear interpolation, constant beyond the end points.
inline double interpolate(const std::vector<std::pair<double, double>>& t, double x) {
  if (x <= t.front().first) return t.front().second;
  if (x >= t.back().first) return t.back().second;
  std::size_t lo = 0, hi = t.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (t[mid].first <= x ? lo : hi) = mid;
  }
  const double a = (x - t[lo].first) / (t[hi].first - t[lo].first);
  return (1.0 - a) * t[lo].second + a * t[hi].second;
}

}  // namespace nonlocal::io
