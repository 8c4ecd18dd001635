#include "compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "asd/errors.hpp"

namespace asdkit {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ptrdiff_t column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : it - header.begin();
}

}  // namespace

SeriesTable read_series(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw asd::MalformedRow(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto t_col = column(header, "t");
  const auto state_col = column(header, "state");
  const auto kind_col = column(header, "kind");
  auto class_col = column(header, "class");
  if (class_col < 0) class_col = column(header, "label");
  std::ptrdiff_t value_col = -1;
  for (const char* name : {"fraction", "mean", "value"})
    if (value_col < 0) value_col = column(header, name);
  if (t_col < 0 || state_col < 0 || class_col < 0 || value_col < 0)
    throw asd::MalformedRow(origin + ": need t, class (or label), state and a value column");
  const auto run_col = column(header, "run_id");

  SeriesTable table;
  std::string run;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() < header.size()) throw asd::ParseError(origin + ": short row", lineno);
    if (kind_col >= 0 && cells[static_cast<std::size_t>(kind_col)] != "y") continue;
    if (run_col >= 0) {
      const auto& r = cells[static_cast<std::size_t>(run_col)];
      if (run.empty()) run = r;
      if (r != run) throw asd::MalformedRow(origin + ": more than one run_id; compare takes a single run");
    }
    double t = 0.0, v = 0.0;
    try {
      t = std::stod(cells[static_cast<std::size_t>(t_col)]);
      v = std::stod(cells[static_cast<std::size_t>(value_col)]);
    } catch (const std::exception&) {
      throw asd::ParseError(origin + ": non-numeric t or value", lineno);
    }
    auto& s = table.series[{cells[static_cast<std::size_t>(class_col)], cells[static_cast<std::size_t>(state_col)]}];
    if (!s.empty() && t <= s.back().first) throw asd::ParseError(origin + ": times must increase per series", lineno);
    s.emplace_back(t, v);
  }
  return table;
}

SeriesTable read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw asd::Error("cannot open '" + path + "'");
  return read_series(in, path);
}

GapReport compare_series(const SeriesTable& a, const SeriesTable& b) {
  GapReport r;
  constexpr double kTimeTol = 1e-9;
  for (const auto& [key, sa] : a.series) {
    auto it = b.series.find(key);
    if (it == b.series.end()) continue;
    const auto& sb = it->second;
    GapReport::Entry e{key.first, key.second, 0.0, 0.0, {}, {}};
    std::size_t j = 0;
    for (const auto& [t, va] : sa) {
      if (sb.empty() || t < sb.front().first - kTimeTol || t > sb.back().first + kTimeTol)
        throw asd::GridMismatch("time " + std::to_string(t) + " of " + key.first + "/" + key.second +
                                " lies outside the other grid");
      while (j + 1 < sb.size() && sb[j + 1].first <= t + kTimeTol) ++j;
      double vb = sb[j].second;
      if (std::abs(sb[j].first - t) > kTimeTol && j + 1 < sb.size()) {
        const double w = (t - sb[j].first) / (sb[j + 1].first - sb[j].first);
        vb = (1.0 - w) * sb[j].second + w * sb[j + 1].second;
      }
      const double gap = va - vb;
      e.times.push_back(t);
      e.gaps.push_back(gap);
      if (std::abs(gap) > e.sup) {
        e.sup = std::abs(gap);
        e.at = t;
      }
    }
    r.sup = std::max(r.sup, e.sup);
    r.entries.push_back(std::move(e));
  }
  if (r.entries.empty()) throw asd::GridMismatch("the inputs share no (class, state) series");
  return r;
}

void write_gap_summary(const GapReport& r, std::ostream& out) {
  out.precision(12);
  out << "class,state,sup_gap,t_at_sup\n";
  for (const auto& e : r.entries) out << e.cls << ',' << e.state << ',' << e.sup << ',' << e.at << '\n';
}

void write_gap_series(const GapReport& r, std::ostream& out) {
  out.precision(12);
  out << "t,class,state,gap\n";
  for (const auto& e : r.entries)
    for (std::size_t i = 0; i < e.times.size(); ++i)
      out << e.times[i] << ',' << e.cls << ',' << e.state << ',' << e.gaps[i] << '\n';
}

}  // namespace asdkit
