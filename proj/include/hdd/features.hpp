#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hdd/hetnet.hpp"
#include "hdd/metapath.hpp"

namespace hdd {

// First year each author published on the topic; absent means never.
struct ActivationTable {
  std::string topic;
  std::map<std::string, int> first_active_year;

  bool active_by(const std::string& id, int year) const {
    auto it = first_active_year.find(id);
    return it != first_active_year.end() && it->second <= year;
  }

  bool ever_active(const std::string& id) const { return first_active_year.count(id) != 0; }
};

inline ActivationTable activation_table(const HeteroGraph& g, const std::string& topic) {
  if (topic.empty()) throw ConfigError("activation_table: empty topic");
  ActivationTable t;
  t.topic = to_lower_ascii(topic);
  for (const Edge& e : g.edges()) {
    if (e.label != "writes") continue;
    const Node& paper = g.node(e.dst);
    if (!paper.year || !g.has_topic(e.dst, t.topic)) continue;
    const std::string& author = g.node(e.src).id;
    auto it = t.first_active_year.find(author);
    if (it == t.first_active_year.end() || *paper.year < it->second)
      t.first_active_year[author] = *paper.year;
  }
  return t;
}

// Activation table over papers themselves: a paper is "active" from its own
// year when it carries the topic. Used to rank anchors for cascade features.
inline ActivationTable paper_activation_table(const HeteroGraph& g, const std::string& topic) {
  if (topic.empty()) throw ConfigError("paper_activation_table: empty topic");
  ActivationTable t;
  t.topic = to_lower_ascii(topic);
  for (size_t i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(static_cast<int>(i));
    if (n.type == g.schema().timed_type && n.year && g.has_topic(static_cast<int>(i), t.topic))
      t.first_active_year[n.id] = *n.year;
  }
  return t;
}

enum class WindowMode { cumulative, sliding };

inline WindowMode parse_window_mode(const std::string& s) {
  if (s == "cumulative") return WindowMode::cumulative;
  if (s == "sliding") return WindowMode::sliding;
  throw ConfigError("unknown window mode '" + s + "' (cumulative|sliding)");
}

// One side of a temporal split: feature windows plus the labeling interval
// (boundary_year, label_year]. Nodes active at the boundary are seeds and are
// excluded from samples.
struct FoldWindows {
  std::vector<TimeWindow> feature_windows;
  int boundary_year = 0;
  int label_year = 0;
};

struct Split {
  FoldWindows train;
  FoldWindows test;
  int t = 0;
  int window_len = 0;
};

namespace feature_detail {

// One window per step year. Cumulative windows reach back to the origin (the
// first data year by default), sliding windows cover the step year alone.
inline std::vector<TimeWindow> step_windows(int first, int last, WindowMode mode, int origin) {
  std::vector<TimeWindow> out;
  for (int y = first; y <= last; ++y)
    out.push_back(mode == WindowMode::cumulative ? TimeWindow{std::min(origin, first), y} : TimeWindow{y, y});
  return out;
}

}  // namespace feature_detail

inline constexpr int kFoldLocalOrigin = INT32_MAX;

// Topic-diffusion split at year t: train on feature steps t-W .. t-1 with
// labels from activations in (t-1, t]; test on steps t-W+1 .. t with labels
// from (t, t+1]. `origin` anchors cumulative windows (pass the first data
// year); by default they reach back no further than the fold itself.
inline Split make_split(int t, int window_len = 4, WindowMode mode = WindowMode::cumulative,
                        int origin = kFoldLocalOrigin) {
  if (window_len < 1) throw ConfigError("make_split: window_len must be >= 1");
  if (t <= window_len) throw ConfigError("make_split: t must exceed window_len");
  Split s;
  s.t = t;
  s.window_len = window_len;
  s.train.feature_windows = feature_detail::step_windows(t - window_len, t - 1, mode, origin);
  s.train.boundary_year = t - 1;
  s.train.label_year = t;
  s.test.feature_windows = feature_detail::step_windows(t - window_len + 1, t, mode, origin);
  s.test.boundary_year = t;
  s.test.label_year = t + 1;
  return s;
}

// Cascade split at year t: the member aggregation windows run through the
// fold's boundary year itself, and the label interval is the following year.
inline Split make_cascade_split(int t, int window_len = 4, WindowMode mode = WindowMode::cumulative,
                                int origin = kFoldLocalOrigin) {
  if (window_len < 1) throw ConfigError("make_cascade_split: window_len must be >= 1");
  if (t <= window_len) throw ConfigError("make_cascade_split: t must exceed window_len");
  Split s;
  s.t = t;
  s.window_len = window_len;
  s.train.feature_windows = feature_detail::step_windows(t - 1 - window_len, t - 1, mode, origin);
  s.train.boundary_year = t - 1;
  s.train.label_year = t;
  s.test.feature_windows = feature_detail::step_windows(t - window_len, t, mode, origin);
  s.test.boundary_year = t;
  s.test.label_year = t + 1;
  return s;
}

// Fixed, deterministically ordered anchor columns: ever-active endpoints
// first, then by total meta-path degree descending, then by id.
struct AnchorSet {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> rank;

  size_t size() const { return ids.size(); }
};

inline AnchorSet build_anchor_set(const std::vector<MetaPathGraph>& snapshots, const ActivationTable& activation,
                                  size_t cap) {
  if (snapshots.empty()) throw ConfigError("build_anchor_set: no snapshots");
  const auto& universe = snapshots.front().vertex_ids;
  for (const auto& s : snapshots)
    if (s.vertex_ids != universe) throw ConfigError("build_anchor_set: snapshots disagree on vertex universe");

  struct Key {
    int ever_active;
    long long degree;
    const std::string* id;
  };
  std::vector<Key> keys;
  keys.reserve(universe.size());
  for (size_t i = 0; i < universe.size(); ++i) {
    long long deg = 0;
    for (const auto& s : snapshots) deg += s.adjacency.row_sum(static_cast<int>(i));
    keys.push_back({activation.ever_active(universe[i]) ? 1 : 0, deg, &universe[i]});
  }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    if (a.ever_active != b.ever_active) return a.ever_active > b.ever_active;
    if (a.degree != b.degree) return a.degree > b.degree;
    return *a.id < *b.id;
  });

  AnchorSet out;
  for (const auto& k : keys) {
    if (out.ids.size() >= cap) break;
    out.rank.emplace(*k.id, static_cast<int>(out.ids.size()));
    out.ids.push_back(*k.id);
  }
  return out;
}

enum class MergeMode { concat, sum };

inline MergeMode parse_merge_mode(const std::string& s) {
  if (s == "concat") return MergeMode::concat;
  if (s == "sum") return MergeMode::sum;
  throw ConfigError("unknown merge mode '" + s + "' (concat|sum)");
}

// Per-node feature sequences: steps x (meta-paths x anchors) nonnegative
// counts, one row per sample, plus a binary or real target per sample.
struct SampleSet {
  int steps = 0;       // W
  int n_metapaths = 0; // K after merging
  int n_anchors = 0;   // F
  std::vector<std::string> ids;
  std::vector<float> features;  // ids.size() * steps * n_metapaths * n_anchors
  std::vector<float> targets;

  size_t size() const { return ids.size(); }
  size_t step_dim() const { return static_cast<size_t>(n_metapaths) * static_cast<size_t>(n_anchors); }
  size_t sample_dim() const { return static_cast<size_t>(steps) * step_dim(); }
  const float* sample(size_t i) const { return features.data() + i * sample_dim(); }

  size_t positive_count() const {
    size_t p = 0;
    for (float t : targets) p += static_cast<size_t>(t > 0.5f);
    return p;
  }

  // features.bin: magic "HDDF", then u32 {steps, n_metapaths, n_anchors, count}
  // little-endian, then count rows of float32. labels go to a TSV sidecar.
  void save(const std::string& features_path, const std::string& labels_path) const {
    std::ofstream out(features_path, std::ios::binary);
    if (!out) throw StageError("io", "cannot open for writing: " + features_path);
    out.write("HDDF", 4);
    uint32_t header[4] = {static_cast<uint32_t>(steps), static_cast<uint32_t>(n_metapaths),
                          static_cast<uint32_t>(n_anchors), static_cast<uint32_t>(ids.size())};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(features.data()),
              static_cast<std::streamsize>(features.size() * sizeof(float)));
    if (!out) throw StageError("io", "write failed: " + features_path);

    std::string l = "node_id\tlabel\n";
    for (size_t i = 0; i < ids.size(); ++i) {
      float t = targets[i];
      l += ids[i] + "\t";
      if (t == static_cast<long long>(t))
        l += std::to_string(static_cast<long long>(t));
      else
        l += format_fixed(t, 6);
      l += "\n";
    }
    write_text_file(labels_path, l);
  }

  static SampleSet load(const std::string& features_path, const std::string& labels_path) {
    std::ifstream in(features_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open features file: " + features_path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "HDDF", 4) != 0)
      throw ConfigError(features_path + ": bad magic, expected HDDF");
    uint32_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw ConfigError(features_path + ": truncated header");
    SampleSet s;
    s.steps = static_cast<int>(header[0]);
    s.n_metapaths = static_cast<int>(header[1]);
    s.n_anchors = static_cast<int>(header[2]);
    size_t count = header[3];
    s.features.resize(count * s.sample_dim());
    in.read(reinterpret_cast<char*>(s.features.data()),
            static_cast<std::streamsize>(s.features.size() * sizeof(float)));
    if (!in) throw ConfigError(features_path + ": truncated feature payload");

    std::ifstream lf(labels_path);
    if (!lf) throw ConfigError("cannot open labels file: " + labels_path);
    std::string line;
    std::getline(lf, line);
    while (std::getline(lf, line)) {
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2) throw ConfigError(labels_path + ": malformed line");
      s.ids.push_back(cols[0]);
      s.targets.push_back(std::stof(cols[1]));
    }
    if (s.ids.size() != count) throw ConfigError(labels_path + ": label count does not match features");
    return s;
  }
};

namespace feature_detail {

// Writes one node's anchor-restricted adjacency row for every meta-path of one
// step into dst (step_dim floats).
inline void fill_step(float* dst, const std::vector<const MetaPathGraph*>& graphs, int row,
                      const AnchorSet& anchors, MergeMode merge) {
  size_t f = anchors.size();
  for (size_t k = 0; k < graphs.size(); ++k) {
    const SparseMatrix& a = graphs[k]->adjacency;
    float* base = merge == MergeMode::concat ? dst + k * f : dst;
    if (row < 0) continue;
    for (int e = a.row_ptr[static_cast<size_t>(row)]; e < a.row_ptr[static_cast<size_t>(row) + 1]; ++e) {
      const auto& entry = a.entries[static_cast<size_t>(e)];
      auto it = anchors.rank.find(graphs[k]->vertex_ids[static_cast<size_t>(entry.col)]);
      if (it != anchors.rank.end()) base[it->second] += static_cast<float>(entry.weight);
    }
  }
}

}  // namespace feature_detail

// One sample per endpoint node not yet active at the fold boundary. Step tau
// concatenates (or sums) each meta-path's adjacency row restricted to the
// anchor columns; the label marks activation inside (boundary, label_year].
inline SampleSet build_diffusion_samples(const std::vector<std::vector<MetaPathGraph>>& series,
                                         const ActivationTable& activation, const FoldWindows& fold,
                                         const AnchorSet& anchors, MergeMode merge = MergeMode::concat) {
  if (series.empty()) throw ConfigError("build_diffusion_samples: no meta-path series");
  size_t steps = fold.feature_windows.size();
  const auto& universe = series.front().front().vertex_ids;
  for (const auto& s : series) {
    if (s.size() != steps) throw ConfigError("build_diffusion_samples: series length != fold windows");
    for (const auto& g : s)
      if (g.vertex_ids != universe)
        throw ConfigError("build_diffusion_samples: inconsistent vertex universe across series");
  }

  SampleSet out;
  out.steps = static_cast<int>(steps);
  out.n_metapaths = merge == MergeMode::concat ? static_cast<int>(series.size()) : 1;
  out.n_anchors = static_cast<int>(anchors.size());

  for (size_t v = 0; v < universe.size(); ++v) {
    const std::string& id = universe[v];
    if (activation.active_by(id, fold.boundary_year)) continue;  // seed node
    out.ids.push_back(id);
    size_t off = out.features.size();
    out.features.resize(off + out.sample_dim(), 0.0f);
    for (size_t tau = 0; tau < steps; ++tau) {
      std::vector<const MetaPathGraph*> graphs;
      graphs.reserve(series.size());
      for (const auto& s : series) graphs.push_back(&s[tau]);
      feature_detail::fill_step(out.features.data() + off + tau * out.step_dim(), graphs,
                                static_cast<int>(v), anchors, merge);
    }
    auto it = activation.first_active_year.find(id);
    bool pos = it != activation.first_active_year.end() && it->second > fold.boundary_year &&
               it->second <= fold.label_year;
    out.targets.push_back(pos ? 1.0f : 0.0f);
  }
  return out;
}

struct CascadeHop {
  std::string citing;
  std::string cited;
  int elapsed = 0;  // citing year - cited year

  bool operator==(const CascadeHop&) const = default;
};

// Topic-rooted citation cascade. hops[0] is the root marker (citing == cited
// == root, elapsed 0); the rest enumerate citation hops in BFS order.
struct Cascade {
  std::string root_id;
  std::vector<CascadeHop> hops;
  std::vector<std::pair<std::string, int>> members;  // (paper id, year), sorted by id

  size_t member_count_by(int year) const {
    size_t n = 0;
    for (const auto& [id, y] : members) n += static_cast<size_t>(y <= year);
    return n;
  }
};

// One cascade per root: a topic paper citing no other topic paper. Hops follow
// reverse citation edges (who cites me) restricted to topic papers, BFS order,
// each paper visited once per cascade.
inline std::vector<Cascade> extract_cascades(const HeteroGraph& g, const std::string& topic) {
  const std::string t = to_lower_ascii(topic);

  std::vector<int> topic_papers;
  for (size_t i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(static_cast<int>(i));
    if (n.type == g.schema().timed_type && g.has_topic(static_cast<int>(i), t))
      topic_papers.push_back(static_cast<int>(i));
  }
  std::sort(topic_papers.begin(), topic_papers.end(),
            [&](int a, int b) { return g.node(a).id < g.node(b).id; });
  std::set<int> topic_set(topic_papers.begin(), topic_papers.end());

  // citation adjacency restricted to topic papers
  std::map<int, std::vector<int>> citers;  // cited -> citing list
  std::set<int> has_topic_ancestor;        // cites at least one topic paper
  for (const Edge& e : g.edges()) {
    if (e.label != "cites") continue;
    if (!topic_set.count(e.src) || !topic_set.count(e.dst)) continue;
    if (*g.node(e.src).year < *g.node(e.dst).year) continue;  // citations never run back in time
    citers[e.dst].push_back(e.src);
    has_topic_ancestor.insert(e.src);
  }
  for (auto& [cited, list] : citers)
    std::sort(list.begin(), list.end(), [&](int a, int b) { return g.node(a).id < g.node(b).id; });

  std::vector<Cascade> out;
  for (int root : topic_papers) {
    if (has_topic_ancestor.count(root)) continue;
    Cascade c;
    c.root_id = g.node(root).id;
    c.hops.push_back({c.root_id, c.root_id, 0});
    std::set<int> visited{root};
    std::deque<int> queue{root};
    while (!queue.empty()) {
      int cur = queue.front();
      queue.pop_front();
      auto it = citers.find(cur);
      if (it == citers.end()) continue;
      for (int citing : it->second) {
        if (visited.count(citing)) continue;
        visited.insert(citing);
        c.hops.push_back({g.node(citing).id, g.node(cur).id, *g.node(citing).year - *g.node(cur).year});
        queue.push_back(citing);
      }
    }
    for (int p : visited) c.members.emplace_back(g.node(p).id, *g.node(p).year);
    std::sort(c.members.begin(), c.members.end());
    out.push_back(std::move(c));
  }
  return out;
}

// Per-fold cascade samples.
//  sizes:    one sample per cascade alive at the boundary; features sum the
//            member rows per step; target is the next-interval member count.
//  adopters: one sample per new paper in (boundary, label_year] citing a
//            member; features are the candidate's own rows (over windows that
//            include its appearance year); label marks topic adoption.
struct CascadeSamples {
  SampleSet sizes;
  SampleSet adopters;
};

inline CascadeSamples build_cascade_samples(const HeteroGraph& g, const std::string& topic,
                                            const std::vector<Cascade>& cascades,
                                            const std::vector<std::vector<MetaPathGraph>>& member_series,
                                            const std::vector<std::vector<MetaPathGraph>>& candidate_series,
                                            const FoldWindows& fold, const AnchorSet& anchors,
                                            MergeMode merge = MergeMode::concat) {
  if (cascades.empty()) throw ConfigError("build_cascade_samples: no cascades");
  if (member_series.empty() || candidate_series.empty())
    throw ConfigError("build_cascade_samples: missing snapshot series");
  const std::string t = to_lower_ascii(topic);
  const auto& universe = member_series.front().front().vertex_ids;

  CascadeSamples out;
  size_t member_steps = member_series.front().size();
  out.sizes.steps = static_cast<int>(member_steps);
  out.sizes.n_metapaths = merge == MergeMode::concat ? static_cast<int>(member_series.size()) : 1;
  out.sizes.n_anchors = static_cast<int>(anchors.size());

  std::set<std::string> all_members_at_boundary;
  for (const Cascade& c : cascades) {
    size_t now = c.member_count_by(fold.boundary_year);
    if (now == 0) continue;  // cascade not born yet
    for (const auto& [id, y] : c.members)
      if (y <= fold.boundary_year) all_members_at_boundary.insert(id);

    out.sizes.ids.push_back(c.root_id);
    size_t off = out.sizes.features.size();
    out.sizes.features.resize(off + out.sizes.sample_dim(), 0.0f);
    for (size_t tau = 0; tau < member_steps; ++tau) {
      std::vector<const MetaPathGraph*> graphs;
      for (const auto& s : member_series) graphs.push_back(&s[tau]);
      for (const auto& [id, y] : c.members) {
        if (y > fold.boundary_year) continue;
        int row = member_series.front().front().row_of_id(id);
        feature_detail::fill_step(out.sizes.features.data() + off + tau * out.sizes.step_dim(), graphs, row,
                                  anchors, merge);
      }
    }
    size_t next = c.member_count_by(fold.label_year);
    out.sizes.targets.push_back(static_cast<float>(next - now));
  }

  // candidate pool: papers appearing in the label interval that cite a member
  size_t cand_steps = candidate_series.front().size();
  out.adopters.steps = static_cast<int>(cand_steps);
  out.adopters.n_metapaths = merge == MergeMode::concat ? static_cast<int>(candidate_series.size()) : 1;
  out.adopters.n_anchors = static_cast<int>(anchors.size());

  std::set<std::string> candidates;
  for (const Edge& e : g.edges()) {
    if (e.label != "cites") continue;
    const Node& citing = g.node(e.src);
    if (!citing.year || *citing.year <= fold.boundary_year || *citing.year > fold.label_year) continue;
    if (!all_members_at_boundary.count(g.node(e.dst).id)) continue;
    candidates.insert(citing.id);
  }
  for (const std::string& id : candidates) {
    out.adopters.ids.push_back(id);
    size_t off = out.adopters.features.size();
    out.adopters.features.resize(off + out.adopters.sample_dim(), 0.0f);
    int row = candidate_series.front().front().row_of_id(id);
    for (size_t tau = 0; tau < cand_steps; ++tau) {
      std::vector<const MetaPathGraph*> graphs;
      for (const auto& s : candidate_series) graphs.push_back(&s[tau]);
      feature_detail::fill_step(out.adopters.features.data() + off + tau * out.adopters.step_dim(), graphs, row,
                                anchors, merge);
    }
    int pos = g.node_index(id);
    out.adopters.targets.push_back(pos >= 0 && g.has_topic(pos, t) ? 1.0f : 0.0f);
  }
  (void)universe;
  return out;
}

}  // namespace hdd
