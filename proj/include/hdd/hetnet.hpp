#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdd/common.hpp"

namespace hdd {

struct TimeWindow {
  int start_year = 0;
  int end_year = 0;

  bool contains(int y) const { return y >= start_year && y <= end_year; }
  bool valid() const { return start_year <= end_year; }
  bool operator==(const TimeWindow&) const = default;
};

struct EdgeType {
  std::string src_type;
  std::string label;
  std::string dst_type;
};

// Declares the node and edge types of the network plus which node type carries
// a year attribute.
struct Schema {
  std::vector<std::string> node_types;
  std::vector<EdgeType> edge_types;
  std::string timed_type = "paper";

  bool has_node_type(const std::string& t) const {
    return std::find(node_types.begin(), node_types.end(), t) != node_types.end();
  }

  bool has_edge_type(const std::string& src, const std::string& label, const std::string& dst) const {
    for (const auto& e : edge_types)
      if (e.src_type == src && e.label == label && e.dst_type == dst) return true;
    return false;
  }

  bool has_edge_label(const std::string& label) const {
    for (const auto& e : edge_types)
      if (e.label == label) return true;
    return false;
  }

  void validate() const {
    std::set<std::string> seen;
    for (const auto& t : node_types) {
      if (t.empty()) throw ConfigError("schema: empty node type label");
      if (t.find_first_of(" \t\n") != std::string::npos)
        throw ConfigError("schema: node type label must be a single token: '" + t + "'");
      if (!seen.insert(t).second) throw ConfigError("schema: duplicate node type '" + t + "'");
    }
    for (const auto& e : edge_types) {
      if (!has_node_type(e.src_type) || !has_node_type(e.dst_type))
        throw ConfigError("schema: edge type '" + e.label + "' references undeclared node type");
      if (e.label.empty()) throw ConfigError("schema: empty edge label");
    }
    if (!has_node_type(timed_type)) throw ConfigError("schema: timed type '" + timed_type + "' not declared");
  }

  // Bibliographic network: authors write papers, papers cite papers and appear
  // in venues, authors publish in venues, papers carry terms.
  static Schema bibliographic() {
    Schema s;
    s.node_types = {"author", "paper", "venue", "term"};
    s.edge_types = {
        {"author", "writes", "paper"},
        {"paper", "cites", "paper"},
        {"paper", "published_in", "venue"},
        {"author", "publishes_in", "venue"},
        {"paper", "has_term", "term"},
    };
    s.timed_type = "paper";
    return s;
  }
};

struct Node {
  std::string id;
  std::string type;
  std::optional<int> year;
  std::vector<std::string> topics;  // lowercase strings
  std::string name;
};

struct Edge {
  int src = -1;  // node positions
  int dst = -1;
  std::string label;
};

class HeteroGraph {
 public:
  HeteroGraph() : schema_(Schema::bibliographic()) {}
  explicit HeteroGraph(Schema schema) : schema_(std::move(schema)) { schema_.validate(); }

  const Schema& schema() const { return schema_; }

  int add_node(Node n) {
    if (n.id.empty()) throw ConfigError("node with empty id");
    if (n.id.find_first_of("\t\n") != std::string::npos || n.name.find_first_of("\t\n") != std::string::npos)
      throw ConfigError("node '" + n.id + "': tab/newline not allowed in id or name");
    if (!schema_.has_node_type(n.type))
      throw ConfigError("node '" + n.id + "': unknown node type '" + n.type + "'");
    if (n.type == schema_.timed_type && !n.year.has_value())
      throw ConfigError("node '" + n.id + "': missing year on timed node");
    if (index_.count(n.id)) throw ConfigError("duplicate node id '" + n.id + "'");
    for (auto& t : n.topics) t = to_lower_ascii(t);
    int pos = static_cast<int>(nodes_.size());
    index_.emplace(n.id, pos);
    nodes_.push_back(std::move(n));
    return pos;
  }

  void add_edge(const std::string& src_id, const std::string& label, const std::string& dst_id) {
    int s = node_index(src_id);
    if (s < 0) throw ConfigError("edge references absent node id '" + src_id + "'");
    int d = node_index(dst_id);
    if (d < 0) throw ConfigError("edge references absent node id '" + dst_id + "'");
    if (!schema_.has_edge_type(nodes_[s].type, label, nodes_[d].type))
      throw ConfigError("edge '" + src_id + "' -[" + label + "]-> '" + dst_id + "' does not match schema (" +
                        nodes_[s].type + " -> " + nodes_[d].type + ")");
    edges_.push_back(Edge{s, d, label});
  }

  int node_index(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }

  const Node& node(int pos) const { return nodes_[static_cast<size_t>(pos)]; }
  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edges_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Node positions of the given type, sorted by id.
  std::vector<int> nodes_of_type(const std::string& type) const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].type == type) out.push_back(static_cast<int>(i));
    std::sort(out.begin(), out.end(),
              [&](int a, int b) { return nodes_[static_cast<size_t>(a)].id < nodes_[static_cast<size_t>(b)].id; });
    return out;
  }

  bool has_topic(int pos, const std::string& topic_lower) const {
    const auto& ts = nodes_[static_cast<size_t>(pos)].topics;
    return std::find(ts.begin(), ts.end(), topic_lower) != ts.end();
  }

  void set_topics(int pos, std::vector<std::string> topics) {
    for (auto& t : topics) t = to_lower_ascii(t);
    nodes_[static_cast<size_t>(pos)].topics = std::move(topics);
  }

  void add_topic(int pos, const std::string& topic) {
    std::string t = to_lower_ascii(topic);
    if (!has_topic(pos, t)) nodes_[static_cast<size_t>(pos)].topics.push_back(t);
  }

 private:
  Schema schema_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;
};

namespace detail {

inline const std::string kNodesHeader = "id\ttype\tyear\ttopics\tname";
inline const std::string kEdgesHeader = "src\tlabel\tdst";

inline std::string loc(const std::string& path, size_t lineno) {
  return path + ":" + std::to_string(lineno) + ": ";
}

}  // namespace detail

// Reads the canonical TSV pair. Both files are UTF-8 with LF line endings,
// literal tab separators and a fixed header line.
inline HeteroGraph load_graph(const std::string& nodes_path, const std::string& edges_path, const Schema& schema) {
  HeteroGraph g(schema);

  std::ifstream nf(nodes_path, std::ios::binary);
  if (!nf) throw ConfigError("cannot open nodes file: " + nodes_path);
  std::string line;
  size_t lineno = 0;
  if (!std::getline(nf, line)) throw ConfigError(nodes_path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != detail::kNodesHeader)
    throw ConfigError(detail::loc(nodes_path, lineno) + "bad header, expected '" + detail::kNodesHeader + "'");
  while (std::getline(nf, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 5)
      throw ConfigError(detail::loc(nodes_path, lineno) + "malformed line: expected 5 fields, got " +
                        std::to_string(cols.size()));
    Node n;
    n.id = cols[0];
    n.type = cols[1];
    if (!cols[2].empty()) {
      try {
        size_t used = 0;
        n.year = std::stoi(cols[2], &used);
        if (used != cols[2].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(detail::loc(nodes_path, lineno) + "malformed year '" + cols[2] + "'");
      }
    }
    if (!cols[3].empty()) {
      for (auto& t : split(cols[3], '|'))
        if (!t.empty()) n.topics.push_back(t);
    }
    n.name = cols[4];
    try {
      g.add_node(std::move(n));
    } catch (const ConfigError& e) {
      throw ConfigError(detail::loc(nodes_path, lineno) + e.what());
    }
  }

  std::ifstream ef(edges_path, std::ios::binary);
  if (!ef) throw ConfigError("cannot open edges file: " + edges_path);
  lineno = 0;
  if (!std::getline(ef, line)) throw ConfigError(edges_path + ": empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != detail::kEdgesHeader)
    throw ConfigError(detail::loc(edges_path, lineno) + "bad header, expected '" + detail::kEdgesHeader + "'");
  while (std::getline(ef, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw ConfigError(detail::loc(edges_path, lineno) + "malformed line: expected 3 fields, got " +
                        std::to_string(cols.size()));
    try {
      g.add_edge(cols[0], cols[1], cols[2]);
    } catch (const ConfigError& e) {
      throw ConfigError(detail::loc(edges_path, lineno) + e.what());
    }
  }
  return g;
}

// Writes the canonical TSV pair. Nodes are sorted by id and edges by
// (src, label, dst) so output bytes depend only on graph content.
inline void save_graph(const HeteroGraph& g, const std::string& nodes_path, const std::string& edges_path) {
  std::string nout = detail::kNodesHeader + "\n";
  std::vector<int> order;
  order.reserve(g.node_count());
  for (size_t i = 0; i < g.node_count(); ++i) order.push_back(static_cast<int>(i));
  std::sort(order.begin(), order.end(), [&](int a, int b) { return g.node(a).id < g.node(b).id; });
  for (int i : order) {
    const Node& n = g.node(i);
    nout += n.id;
    nout += '\t';
    nout += n.type;
    nout += '\t';
    if (n.year) nout += std::to_string(*n.year);
    nout += '\t';
    nout += join(n.topics, "|");
    nout += '\t';
    nout += n.name;
    nout += '\n';
  }
  write_text_file(nodes_path, nout);

  std::vector<std::string> lines;
  lines.reserve(g.edge_count());
  for (const Edge& e : g.edges())
    lines.push_back(g.node(e.src).id + "\t" + e.label + "\t" + g.node(e.dst).id);
  std::sort(lines.begin(), lines.end());
  std::string eout = detail::kEdgesHeader + "\n";
  for (const auto& l : lines) {
    eout += l;
    eout += '\n';
  }
  write_text_file(edges_path, eout);
}

// Subgraph keeping all non-timed nodes, timed nodes inside the window, and
// edges whose endpoints both survive.
inline HeteroGraph slice_window(const HeteroGraph& g, TimeWindow window) {
  if (!window.valid()) throw ConfigError("invalid time window");
  HeteroGraph out(g.schema());
  std::vector<char> keep(g.node_count(), 0);
  for (size_t i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(static_cast<int>(i));
    bool timed = n.type == g.schema().timed_type;
    if (!timed || (n.year && window.contains(*n.year))) {
      keep[i] = 1;
      out.add_node(n);
    }
  }
  for (const Edge& e : g.edges()) {
    if (keep[static_cast<size_t>(e.src)] && keep[static_cast<size_t>(e.dst)])
      out.add_edge(g.node(e.src).id, e.label, g.node(e.dst).id);
  }
  return out;
}

}  // namespace hdd
