#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "asd/errors.hpp"
#include "asd/graph.hpp"

namespace asd {

namespace {

bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

std::map<std::int64_t, std::string> load_label_map(std::istream& in) {
  std::map<std::int64_t, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    std::int64_t node;
    std::string label, extra;
    if (!(ss >> node >> label)) throw ParseError("expected 'node label'", lineno);
    if (ss >> extra) throw ParseError("trailing tokens after 'node label'", lineno);
    if (!out.emplace(node, label).second) throw ParseError("node listed twice in label map", lineno);
  }
  return out;
}

LoadedGraph load_edge_list(std::istream& edges, const std::map<std::int64_t, std::string>* label_map) {
  std::vector<std::int64_t> raw_tails, raw_heads;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    std::istringstream ss(line);
    std::int64_t t, h;
    std::string extra;
    if (!(ss >> t >> h)) throw ParseError("expected 'tail head' integer pair", lineno);
    if (ss >> extra) throw ParseError("trailing tokens after 'tail head'", lineno);
    raw_tails.push_back(t);
    raw_heads.push_back(h);
  }

  std::vector<std::int64_t> ids(raw_tails);
  ids.insert(ids.end(), raw_heads.begin(), raw_heads.end());
  if (label_map)
    for (const auto& [node, label] : *label_map) ids.push_back(node);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<std::int64_t, NodeId> dense;
  dense.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) dense[ids[i]] = static_cast<NodeId>(i);

  LabelSet labels;
  std::vector<std::uint16_t> label_of(ids.size(), 0);
  if (label_map) {
    std::vector<std::string> names;
    for (const auto& [node, label] : *label_map)
      if (std::find(names.begin(), names.end(), label) == names.end()) names.push_back(label);
    std::sort(names.begin(), names.end());
    if (names.empty()) names.push_back("default");
    labels = LabelSet(names);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto it = label_map->find(ids[i]);
      if (it == label_map->end()) throw ParseError("node " + std::to_string(ids[i]) + " has no label", 0);
      label_of[i] = static_cast<std::uint16_t>(labels.index(it->second));
    }
  }

  std::vector<NodeId> tails(raw_tails.size()), heads(raw_heads.size());
  for (std::size_t e = 0; e < raw_tails.size(); ++e) {
    tails[e] = dense[raw_tails[e]];
    heads[e] = dense[raw_heads[e]];
  }
  return {LabeledGraph(std::move(labels), std::move(label_of), tails, heads), std::move(ids)};
}

LoadedGraph load_edge_list(const std::string& path, const std::optional<std::string>& label_map_path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path);
  if (label_map_path) {
    std::ifstream lm(*label_map_path);
    if (!lm) throw std::runtime_error("cannot open label map " + *label_map_path);
    auto map = load_label_map(lm);
    return load_edge_list(in, &map);
  }
  return load_edge_list(in, nullptr);
}

void write_edge_list(const LabeledGraph& g, std::ostream& out) {
  for (NodeId v = 0; v < g.n(); ++v)
    for (NodeId w : g.out_edges(v)) out << v << ' ' << w << '\n';
}

void write_id_mapping(const LoadedGraph& g, std::ostream& out) {
  out << "# original dense\n";
  for (std::size_t i = 0; i < g.original_ids.size(); ++i) out << g.original_ids[i] << ' ' << i << '\n';
}

}  // namespace asd
