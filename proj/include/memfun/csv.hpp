#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "memfun/error.hpp"
#include "memfun/format.hpp"
#include "memfun/trajectory.hpp"

namespace memfun {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
};

/// Reads the two-column `t,value` format. The first row may be a header.
/// Errors carry the 1-based line number of the offending row.
inline TimeSeries read_time_series(std::istream& in, const std::string& source = "<stream>") {
  TimeSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = detail::trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    auto fail = [&](const std::string& what) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + what);
    };
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      fail("expected exactly two comma-separated columns");
    }
    double t = 0.0;
    double v = 0.0;
    const bool ok_t = detail::parse_double(row.substr(0, comma), t);
    const bool ok_v = detail::parse_double(row.substr(comma + 1), v);
    if (first_content && !ok_t) {
      first_content = false;
      continue;  // header row
    }
    if (!ok_t || !ok_v) fail("could not parse a decimal number");
    first_content = false;
    if (!std::isfinite(t) || !std::isfinite(v)) fail("non-finite value");
    if (!series.t.empty() && t < series.t.back()) fail("rows must be sorted by t");
    if (series.t.size() >= 2 && t == series.t.back() && t == series.t[series.t.size() - 2]) {
      fail("a time may appear at most twice");
    }
    series.t.push_back(t);
    series.value.push_back(v);
  }
  if (series.t.size() < 2) throw ConfigError(source + ": need at least two data rows");
  if (series.t.front() != 0.0) throw ConfigError(source + ": first row must be at t = 0");
  return series;
}

/// Builds a trajectory on [0, last t] from CSV text.
inline Trajectory read_trajectory_csv(std::istream& in, std::size_t grid_points = TimeDomain::default_grid_points,
                                      const std::string& source = "<stream>") {
  const auto series = read_time_series(in, source);
  try {
    return Trajectory::sampled(TimeDomain(series.t.back(), grid_points), series.t, series.value);
  } catch (const InvalidParameter& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

inline Trajectory read_trajectory_csv(const std::string& path,
                                      std::size_t grid_points = TimeDomain::default_grid_points) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file '" + path + "'");
  return read_trajectory_csv(in, grid_points, path);
}

/// Samples f at every grid node and writes both one-sided values at each
/// breakpoint, so the file re-ingests to the same node values.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& f, bool header = true) {
  if (header) out << "t,value\n";
  std::vector<double> times(f.domain().nodes().begin(), f.domain().nodes().end());
  times.insert(times.end(), f.breakpoints().begin(), f.breakpoints().end());
  times.insert(times.end(), f.knots().begin(), f.knots().end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) {
    const bool jump = std::binary_search(f.breakpoints().begin(), f.breakpoints().end(), t);
    if (jump) {
      out << format_double(t) << ',' << format_double(f.left_value(t)) << '\n';
      out << format_double(t) << ',' << format_double(f.right_value(t)) << '\n';
    } else {
      out << format_double(t) << ',' << format_double(f(t)) << '\n';
    }
  }
}

}  // namespace memfun
