#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace asdkit {

// Long-format series keyed by (class, state). Accepts simulation trajectories
// (fraction), ensemble summaries (mean), class fractions from `ode` (fraction)
// and raw ODE output (value, y rows only, label as class).
struct SeriesTable {
  std::map<std::pair<std::string, std::string>, std::vector<std::pair<double, double>>> series;
};

SeriesTable read_series(std::istream& in, const std::string& origin = "<csv>");
SeriesTable read_series_file(const std::string& path);

struct GapReport {
  struct Entry {
    std::string cls, state;
    double sup = 0.0;
    double at = 0.0;
    std::vector<double> times;
    std::vector<double> gaps;  // a - b
  };
  std::vector<Entry> entries;
  double sup = 0.0;
};

// b is linearly interpolated onto the time grid of a; throws asd::GridMismatch
// when a time of a lies outside the range of b or no series are shared.
GapReport compare_series(const SeriesTable& a, const SeriesTable& b);

void write_gap_summary(const GapReport& r, std::ostream& out);
void write_gap_series(const GapReport& r, std::ostream& out);

}  // namespace asdkit
