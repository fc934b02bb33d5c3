#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdd/hetnet.hpp"

namespace hdd {

// Alternating node-type / edge-label sequence, e.g. APA = author writes paper
// writes author. Endpoint types must match: the projection lives on one vertex
// set.
struct MetaPathSpec {
  std::vector<std::string> node_seq;  // length l+1
  std::vector<std::string> edge_seq;  // length l
  std::string name;

  size_t length() const { return edge_seq.size(); }
};

// Coordinate-list sparse matrix with CSR row offsets; weights are path counts.
struct SparseMatrix {
  struct Entry {
    int row = 0;
    int col = 0;
    long long weight = 0;
  };

  int n_rows = 0;
  int n_cols = 0;
  std::vector<Entry> entries;  // sorted by (row, col), weights > 0
  std::vector<int> row_ptr;    // size n_rows + 1

  static SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Entry> triplets) {
    SparseMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    std::sort(triplets.begin(), triplets.end(), [](const Entry& a, const Entry& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const Entry& e : triplets) {
      if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
        throw std::out_of_range("sparse entry out of range");
      if (e.weight == 0) continue;
      if (!m.entries.empty() && m.entries.back().row == e.row && m.entries.back().col == e.col)
        m.entries.back().weight += e.weight;
      else
        m.entries.push_back(e);
    }
    m.entries.erase(std::remove_if(m.entries.begin(), m.entries.end(),
                                   [](const Entry& e) { return e.weight == 0; }),
                    m.entries.end());
    m.build_row_ptr();
    return m;
  }

  void build_row_ptr() {
    row_ptr.assign(static_cast<size_t>(n_rows) + 1, 0);
    for (const Entry& e : entries) ++row_ptr[static_cast<size_t>(e.row) + 1];
    for (int r = 0; r < n_rows; ++r) row_ptr[static_cast<size_t>(r) + 1] += row_ptr[static_cast<size_t>(r)];
  }

  long long at(int r, int c) const {
    for (int k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k)
      if (entries[static_cast<size_t>(k)].col == c) return entries[static_cast<size_t>(k)].weight;
    return 0;
  }

  long long row_sum(int r) const {
    long long s = 0;
    for (int k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k)
      s += entries[static_cast<size_t>(k)].weight;
    return s;
  }

  size_t nnz() const { return entries.size(); }

  // this * other, row-by-row with a dense accumulator over touched columns.
  SparseMatrix multiply(const SparseMatrix& other) const {
    if (n_cols != other.n_rows) throw std::invalid_argument("sparse multiply: shape mismatch");
    SparseMatrix out;
    out.n_rows = n_rows;
    out.n_cols = other.n_cols;
    std::vector<long long> acc(static_cast<size_t>(other.n_cols), 0);
    std::vector<int> touched;
    for (int r = 0; r < n_rows; ++r) {
      touched.clear();
      for (int k = row_ptr[static_cast<size_t>(r)]; k < row_ptr[static_cast<size_t>(r) + 1]; ++k) {
        const Entry& a = entries[static_cast<size_t>(k)];
        for (int j = other.row_ptr[static_cast<size_t>(a.col)]; j < other.row_ptr[static_cast<size_t>(a.col) + 1];
             ++j) {
          const Entry& b = other.entries[static_cast<size_t>(j)];
          if (acc[static_cast<size_t>(b.col)] == 0) touched.push_back(b.col);
          acc[static_cast<size_t>(b.col)] += a.weight * b.weight;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (int c : touched) {
        if (acc[static_cast<size_t>(c)] != 0)
          out.entries.push_back(Entry{r, c, acc[static_cast<size_t>(c)]});
        acc[static_cast<size_t>(c)] = 0;
      }
    }
    out.build_row_ptr();
    return out;
  }

  void zero_diagonal() {
    entries.erase(std::remove_if(entries.begin(), entries.end(),
                                 [](const Entry& e) { return e.row == e.col; }),
                  entries.end());
    build_row_ptr();
  }

  bool is_symmetric() const {
    if (n_rows != n_cols) return false;
    for (const Entry& e : entries)
      if (at(e.col, e.row) != e.weight) return false;
    return true;
  }

  bool operator==(const SparseMatrix& o) const {
    if (n_rows != o.n_rows || n_cols != o.n_cols || entries.size() != o.entries.size()) return false;
    for (size_t i = 0; i < entries.size(); ++i)
      if (entries[i].row != o.entries[i].row || entries[i].col != o.entries[i].col ||
          entries[i].weight != o.entries[i].weight)
        return false;
    return true;
  }
};

// Weighted projection of one meta-path over one time window. Rows and columns
// index the endpoint-type universe of the full graph (sorted by node id), so
// snapshots of the same graph and spec always align.
struct MetaPathGraph {
  MetaPathSpec spec;
  TimeWindow window;
  std::vector<int> vertex_nodes;  // node positions, sorted by id
  std::vector<std::string> vertex_ids;
  std::unordered_map<std::string, int> row_by_id;
  SparseMatrix adjacency;

  int row_of_id(const std::string& id) const {
    auto it = row_by_id.find(id);
    return it == row_by_id.end() ? -1 : it->second;
  }
};

namespace metapath_detail {

// Letter shorthand for the compact form: the uppercased first letter of each
// declared type. "C" is context-dependent in bibliographic use: between papers
// it names the cited paper (PCP = paper-citation-paper), between authors the
// conference, i.e. venue (ACA = author-conference-author).
inline std::vector<std::string> compact_types(const std::string& text, const Schema& schema) {
  std::map<char, std::string> m;
  for (const auto& t : schema.node_types) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    if (!m.count(c)) m[c] = t;
  }
  std::vector<std::string> out(text.size());
  std::vector<size_t> pending;
  for (size_t i = 0; i < text.size(); ++i) {
    char u = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    if (u == 'C' && !m.count('C') && schema.has_node_type("venue")) {
      pending.push_back(i);
      continue;
    }
    auto it = m.find(u);
    if (it == m.end())
      throw ConfigError("meta-path '" + text + "': unknown type letter '" + std::string(1, text[i]) + "'");
    out[i] = it->second;
  }
  for (size_t i : pending) {
    bool paper_neighbor = (i > 0 && out[i - 1] == schema.timed_type) ||
                          (i + 1 < out.size() && out[i + 1] == schema.timed_type);
    out[i] = paper_neighbor && schema.has_node_type(schema.timed_type) ? schema.timed_type : "venue";
  }
  return out;
}

// Resolves a consecutive type pair to the unique schema edge label; second
// element tells whether stored edges run src->dst (false) or dst->src (true).
inline std::pair<std::string, bool> resolve_hop(const Schema& schema, const std::string& from,
                                                const std::string& to) {
  std::vector<std::pair<std::string, bool>> candidates;
  for (const auto& e : schema.edge_types) {
    if (e.src_type == from && e.dst_type == to) candidates.emplace_back(e.label, false);
    else if (e.src_type == to && e.dst_type == from && from != to) candidates.emplace_back(e.label, true);
  }
  if (candidates.empty())
    throw ConfigError("meta-path: no edge type connects '" + from + "' and '" + to + "'");
  if (candidates.size() > 1) {
    std::string names;
    for (auto& [l, r] : candidates) names += (names.empty() ? "" : ", ") + l;
    throw ConfigError("meta-path: ambiguous edge between '" + from + "' and '" + to + "' (" + names + ")");
  }
  return candidates.front();
}

}  // namespace metapath_detail

// Accepts a compact letter string ("APA") or dash-separated type labels
// ("author-paper-author"). Each consecutive type pair must resolve to exactly
// one schema edge label; endpoint types must coincide.
inline MetaPathSpec parse_metapath(const std::string& text, const Schema& schema) {
  MetaPathSpec spec;
  std::string compact;
  if (text.find('-') != std::string::npos) {
    for (const auto& part : split(text, '-')) {
      std::string t = trim(part);
      if (!schema.has_node_type(t)) throw ConfigError("meta-path: unknown node type '" + t + "'");
      spec.node_seq.push_back(t);
      compact += static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    }
    spec.name = compact;
  } else {
    spec.node_seq = metapath_detail::compact_types(text, schema);
    spec.name = text;
    for (char& c : spec.name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }

  if (spec.node_seq.size() < 3) throw ConfigError("meta-path '" + text + "': needs at least 3 node types");
  if (spec.node_seq.size() % 2 == 0)
    throw ConfigError("meta-path '" + text + "': even-length sequence");
  if (spec.node_seq.front() != spec.node_seq.back())
    throw ConfigError("meta-path '" + text + "': endpoint types differ");

  for (size_t i = 0; i + 1 < spec.node_seq.size(); ++i) {
    auto [label, reversed] = metapath_detail::resolve_hop(schema, spec.node_seq[i], spec.node_seq[i + 1]);
    (void)reversed;
    spec.edge_seq.push_back(label);
  }
  return spec;
}

// Typed incidence between two node types under one edge label. Entry (i,j)
// counts parallel edges whose timed endpoints (paper years) fall inside the
// window; rows and columns follow sorted node-id order over the full graph.
inline SparseMatrix typed_incidence(const HeteroGraph& g, const std::string& src_type,
                                    const std::string& edge_label, const std::string& dst_type,
                                    TimeWindow window) {
  bool forward = g.schema().has_edge_type(src_type, edge_label, dst_type);
  bool backward = !forward && src_type != dst_type && g.schema().has_edge_type(dst_type, edge_label, src_type);
  if (!forward && !backward)
    throw ConfigError("typed_incidence: (" + src_type + ", " + edge_label + ", " + dst_type + ") not in schema");

  std::vector<int> rows = g.nodes_of_type(src_type);
  std::vector<int> cols = src_type == dst_type ? rows : g.nodes_of_type(dst_type);
  std::vector<int> row_of(g.node_count(), -1), col_of(g.node_count(), -1);
  for (size_t i = 0; i < rows.size(); ++i) row_of[static_cast<size_t>(rows[i])] = static_cast<int>(i);
  for (size_t i = 0; i < cols.size(); ++i) col_of[static_cast<size_t>(cols[i])] = static_cast<int>(i);

  const std::string& timed = g.schema().timed_type;
  auto in_window = [&](int pos) {
    const Node& n = g.node(pos);
    return n.type != timed || (n.year && window.contains(*n.year));
  };

  std::vector<SparseMatrix::Entry> triplets;
  for (const Edge& e : g.edges()) {
    if (e.label != edge_label) continue;
    int s = forward ? e.src : e.dst;
    int d = forward ? e.dst : e.src;
    if (g.node(s).type != src_type || g.node(d).type != dst_type) continue;
    if (!in_window(e.src) || !in_window(e.dst)) continue;
    triplets.push_back({row_of[static_cast<size_t>(s)], col_of[static_cast<size_t>(d)], 1});
  }
  return SparseMatrix::from_triplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()),
                                     std::move(triplets));
}

// Chained product of the per-hop incidences. A path instance counts exactly
// when every timed node along it lies inside the window; the diagonal is
// dropped (an endpoint trivially reaches itself through its own papers).
inline MetaPathGraph metapath_adjacency(const HeteroGraph& g, const MetaPathSpec& spec, TimeWindow window) {
  if (spec.node_seq.size() < 3 || spec.edge_seq.size() + 1 != spec.node_seq.size())
    throw ConfigError("metapath_adjacency: malformed spec");

  MetaPathGraph out;
  out.spec = spec;
  out.window = window;
  out.vertex_nodes = g.nodes_of_type(spec.node_seq.front());
  out.vertex_ids.reserve(out.vertex_nodes.size());
  for (int p : out.vertex_nodes) out.vertex_ids.push_back(g.node(p).id);
  for (size_t i = 0; i < out.vertex_ids.size(); ++i)
    out.row_by_id.emplace(out.vertex_ids[i], static_cast<int>(i));

  SparseMatrix m = typed_incidence(g, spec.node_seq[0], spec.edge_seq[0], spec.node_seq[1], window);
  for (size_t i = 1; i < spec.edge_seq.size(); ++i)
    m = m.multiply(typed_incidence(g, spec.node_seq[i], spec.edge_seq[i], spec.node_seq[i + 1], window));
  m.zero_diagonal();
  out.adjacency = std::move(m);
  return out;
}

// One projection per window over a shared endpoint universe.
inline std::vector<MetaPathGraph> snapshot_series(const HeteroGraph& g, const MetaPathSpec& spec,
                                                  const std::vector<TimeWindow>& windows) {
  if (windows.empty()) throw ConfigError("snapshot_series: no windows");
  std::vector<MetaPathGraph> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(metapath_adjacency(g, spec, w));
  return out;
}

// TSV triplets (row, col, weight) plus a sidecar mapping row -> node id.
inline void save_metapath_graph(const MetaPathGraph& mpg, const std::string& triplets_path,
                                const std::string& index_path) {
  std::string t = "src\tdst\tweight\n";
  for (const auto& e : mpg.adjacency.entries)
    t += std::to_string(e.row) + "\t" + std::to_string(e.col) + "\t" + std::to_string(e.weight) + "\n";
  write_text_file(triplets_path, t);

  std::string idx = "row\tnode_id\n";
  for (size_t i = 0; i < mpg.vertex_ids.size(); ++i)
    idx += std::to_string(i) + "\t" + mpg.vertex_ids[i] + "\n";
  write_text_file(index_path, idx);
}

}  // namespace hdd
