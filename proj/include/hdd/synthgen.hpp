#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hdd/hetnet.hpp"
#include "hdd/rng.hpp"

namespace hdd {

// Synthetic bibliographic network with a planted co-authorship diffusion.
// Venues double as research communities: papers draw their authors mostly from
// one community, with a fixed fraction of bridge papers mixing two, so a topic
// seeded in a few communities percolates gradually instead of saturating.
//
// When solo papers are allowed (authors_per_paper_min == 1) the network takes
// a core-periphery shape instead: the first few communities form a densely
// collaborating core, the rest publish solo except for bridge papers that pair
// a periphery author with core co-authors. Seeded in the core, the topic then
// reaches a periphery author exactly when enough distinct core contacts have
// accumulated, which keeps the planted rule fully visible in co-authorship
// counts.
struct SynthConfig {
  int n_authors = 50;
  TimeWindow years{2000, 2004};
  int papers_per_year = 20;
  int authors_per_paper_min = 2;
  int authors_per_paper_max = 3;
  int n_venues = 5;
  std::string topic = "topic";
  double seed_fraction = 0.1;
  int threshold = 2;
  uint64_t rng_seed = 1;

  void validate() const {
    if (n_authors <= 0) throw ConfigError("synth: n_authors must be positive");
    if (!years.valid()) throw ConfigError("synth: invalid year range");
    if (papers_per_year < 0) throw ConfigError("synth: papers_per_year must be >= 0");
    if (authors_per_paper_min < 1 || authors_per_paper_min > authors_per_paper_max)
      throw ConfigError("synth: bad authors_per_paper range");
    if (authors_per_paper_max > n_authors)
      throw ConfigError("synth: authors_per_paper exceeds n_authors");
    if (n_venues <= 0) throw ConfigError("synth: n_venues must be positive");
    if (seed_fraction < 0.0 || seed_fraction > 1.0)
      throw ConfigError("synth: seed_fraction must lie in [0,1]");
    if (threshold < 1) throw ConfigError("synth: threshold must be >= 1");
    if (topic.empty()) throw ConfigError("synth: empty topic");
  }
};

namespace synth_detail {

inline std::string author_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "a%05d", i);
  return buf;
}

inline std::string venue_id(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "v%03d", i);
  return buf;
}

inline std::string paper_id(int year, int j) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "p%d_%04d", year, j);
  return buf;
}

// Fraction of papers that bridge two communities (community mode). Bridge
// targets are ring local, so influence travels as a spatial wave instead of
// igniting everywhere at once.
inline constexpr double kCrossCommunityRate = 0.10;
inline constexpr int kBridgeReach = 3;
// Core-periphery mode: every 16th community is core, and this fraction of the
// collaborative (core) papers carries one periphery guest author.
inline constexpr int kCommunitiesPerCore = 16;
inline constexpr double kPeripheryGuestRate = 0.6;
// At most this many citations per paper, biased to the paper's own venue.
inline constexpr int kMaxCitations = 3;
inline constexpr double kSameVenueCitationRate = 0.8;

}  // namespace synth_detail

inline HeteroGraph generate_hetnet(const SynthConfig& cfg) {
  cfg.validate();
  using namespace synth_detail;

  HeteroGraph g(Schema::bibliographic());
  for (int i = 0; i < cfg.n_authors; ++i)
    g.add_node(Node{author_id(i), "author", std::nullopt, {}, "Author " + std::to_string(i)});
  for (int v = 0; v < cfg.n_venues; ++v)
    g.add_node(Node{venue_id(v), "venue", std::nullopt, {}, "Venue " + std::to_string(v)});

  // community c holds authors with i*n_venues/n_authors == c (balanced blocks)
  std::vector<std::vector<int>> community(static_cast<size_t>(cfg.n_venues));
  for (int i = 0; i < cfg.n_authors; ++i)
    community[static_cast<size_t>((static_cast<long long>(i) * cfg.n_venues) / cfg.n_authors)].push_back(i);

  std::vector<std::vector<int>> papers_by_year;  // venue-of-paper, per year, for citations
  std::vector<std::vector<std::string>> ids_by_year;

  for (int year = cfg.years.start_year; year <= cfg.years.end_year; ++year) {
    // Per-community slot queues: repeated shuffled passes over the community so
    // every member publishes before anyone gets a second slot in that year.
    std::vector<std::vector<int>> queue(static_cast<size_t>(cfg.n_venues));
    std::vector<size_t> qpos(static_cast<size_t>(cfg.n_venues), 0);
    std::vector<int> pass(static_cast<size_t>(cfg.n_venues), 0);
    auto draw_from = [&](int c, std::set<int>& taken) -> int {
      auto& q = queue[static_cast<size_t>(c)];
      for (int attempts = 0; attempts < cfg.n_authors + 8; ++attempts) {
        if (qpos[static_cast<size_t>(c)] >= q.size()) {
          q = community[static_cast<size_t>(c)];
          auto rng = RngStream::keyed(cfg.rng_seed, "slots", (static_cast<uint64_t>(year) << 20) | static_cast<uint64_t>(c),
                                      static_cast<uint64_t>(pass[static_cast<size_t>(c)]++));
          rng.shuffle(q);
          qpos[static_cast<size_t>(c)] = 0;
        }
        int cand = q[qpos[static_cast<size_t>(c)]++];
        if (!taken.count(cand)) return cand;
      }
      return -1;
    };

    // When solo papers are allowed, each community fills a one-per-member solo
    // quota before collaborative papers form, so every author has a solo
    // outlet every year; the remaining papers carry the co-authorship and the
    // network takes the core-periphery shape.
    const bool core_periphery = cfg.authors_per_paper_min == 1 && cfg.n_venues > 1;
    const int n_core = core_periphery ? std::max(1, cfg.n_venues / kCommunitiesPerCore) : 0;
    const int periphery_start =
        core_periphery && n_core < cfg.n_venues ? community[static_cast<size_t>(n_core)].front() : cfg.n_authors;

    std::vector<int> venue_of(static_cast<size_t>(cfg.papers_per_year));
    std::vector<std::string> ids(static_cast<size_t>(cfg.papers_per_year));
    std::vector<int> solo_quota(static_cast<size_t>(cfg.n_venues), 0);
    if (cfg.authors_per_paper_min == 1)
      for (int c = 0; c < cfg.n_venues; ++c)
        solo_quota[static_cast<size_t>(c)] = static_cast<int>(community[static_cast<size_t>(c)].size());

    for (int j = 0; j < cfg.papers_per_year; ++j) {
      auto rng = RngStream::keyed(cfg.rng_seed, "paper", static_cast<uint64_t>(year), static_cast<uint64_t>(j));
      int venue = j % cfg.n_venues;
      int size = 1;
      bool cross = false;
      int other = venue;
      if (solo_quota[static_cast<size_t>(venue)] > 0) {
        --solo_quota[static_cast<size_t>(venue)];
      } else if (core_periphery) {
        // collaborative papers happen at the core venues
        venue = n_core > 0 ? j % n_core : 0;
        size = static_cast<int>(rng.next_in(std::min(2, cfg.authors_per_paper_max), cfg.authors_per_paper_max));
        cross = periphery_start < cfg.n_authors && rng.next_double() < kPeripheryGuestRate && size >= 2;
      } else {
        size = static_cast<int>(rng.next_in(cfg.authors_per_paper_min, cfg.authors_per_paper_max));
        cross = cfg.n_venues > 1 && rng.next_double() < kCrossCommunityRate && size >= 2;
        if (cross) {
          int reach = std::min(kBridgeReach, cfg.n_venues - 1);
          other = (venue + 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(reach)))) % cfg.n_venues;
        }
      }
      size = std::min(size, cfg.n_authors);
      venue_of[static_cast<size_t>(j)] = venue;

      std::set<int> members;
      if (core_periphery && cross) {
        // one periphery guest joins a core paper
        int guest = periphery_start +
                    static_cast<int>(rng.next_below(static_cast<uint64_t>(cfg.n_authors - periphery_start)));
        members.insert(guest);
      }
      for (int s = static_cast<int>(members.size()); s < size; ++s) {
        int from = (!core_periphery && cross && s >= (size + 1) / 2) ? other : venue;
        int a = draw_from(from, members);
        if (a < 0) a = draw_from(venue == from ? (venue + 1) % cfg.n_venues : venue, members);
        if (a >= 0) members.insert(a);
      }

      std::string pid = paper_id(year, j);
      ids[static_cast<size_t>(j)] = pid;
      g.add_node(Node{pid, "paper", year, {}, ""});
      g.add_edge(pid, "published_in", venue_id(venue));
      for (int a : members) {
        g.add_edge(author_id(a), "writes", pid);
        g.add_edge(author_id(a), "publishes_in", venue_id(venue));
      }

      // citations into earlier years
      if (!papers_by_year.empty()) {
        int n_cites = static_cast<int>(rng.next_below(kMaxCitations + 1));
        std::set<std::string> cited;
        for (int c = 0; c < n_cites; ++c) {
          size_t y_idx = papers_by_year.size() == 1
                             ? 0
                             : papers_by_year.size() - 1 - rng.next_below(std::min<uint64_t>(papers_by_year.size(), 3));
          const auto& pool_venues = papers_by_year[y_idx];
          const auto& pool_ids = ids_by_year[y_idx];
          if (pool_ids.empty()) continue;
          bool same = rng.next_double() < kSameVenueCitationRate;
          int pick = -1;
          if (same) {
            // deterministic scan from a random offset for a same-venue target
            size_t start = rng.next_below(pool_ids.size());
            for (size_t k = 0; k < pool_ids.size(); ++k) {
              size_t idx = (start + k) % pool_ids.size();
              if (pool_venues[idx] == venue) {
                pick = static_cast<int>(idx);
                break;
              }
            }
          }
          if (pick < 0) pick = static_cast<int>(rng.next_below(pool_ids.size()));
          if (cited.insert(pool_ids[static_cast<size_t>(pick)]).second)
            g.add_edge(pid, "cites", pool_ids[static_cast<size_t>(pick)]);
        }
      }
    }
    papers_by_year.push_back(std::move(venue_of));
    ids_by_year.push_back(std::move(ids));
  }
  return g;
}

// Deterministic seed choice for plant_diffusion: the first authors by id.
// Communities are contiguous id ranges, so the topic starts localized in the
// leading communities (the core, in core-periphery mode) and spreads outward
// through collaboration instead of igniting everywhere at once.
inline std::vector<std::string> pick_seed_authors(const SynthConfig& cfg) {
  size_t k = static_cast<size_t>(std::llround(cfg.seed_fraction * cfg.n_authors));
  k = std::min(k, static_cast<size_t>(cfg.n_authors));
  std::vector<std::string> authors;
  for (size_t i = 0; i < k; ++i) authors.push_back(synth_detail::author_id(static_cast<int>(i)));
  return authors;
}

// Plants a threshold diffusion over co-authorship. Seed authors are active in
// the first year and all their first-year papers carry the topic. From then on
// an inactive author activates in year y+1 when at least `threshold` distinct
// co-authors (over papers of year <= y) are already active and the author has a
// paper in year y+1; the activation is realized by tagging one such paper (the
// one with the fewest not-yet-active co-authors, ties broken by paper id).
// Co-authors of a tagged paper count as active from that paper's year onward.
inline HeteroGraph plant_diffusion_with_seeds(const HeteroGraph& graph, const SynthConfig& cfg,
                                              const std::vector<std::string>& seed_ids) {
  HeteroGraph g = graph;  // tags are added onto a copy
  const std::string topic = to_lower_ascii(cfg.topic);

  // paper -> authors, author -> papers per year
  std::map<int, std::vector<int>> paper_authors;       // paper pos -> author pos list
  std::map<int, std::map<int, std::vector<int>>> by_year;  // author pos -> year -> papers
  for (const Edge& e : g.edges()) {
    if (e.label != "writes") continue;
    int author = e.src, paper = e.dst;
    int year = *g.node(paper).year;
    paper_authors[paper].push_back(author);
    by_year[author][year].push_back(paper);
  }
  for (auto& [p, as] : paper_authors) {
    std::sort(as.begin(), as.end());
    as.erase(std::unique(as.begin(), as.end()), as.end());
  }

  std::map<int, int> first_active;  // author pos -> year
  std::set<int> tagged;             // paper pos

  auto tag_paper = [&](int paper, int year) {
    if (!tagged.insert(paper).second) return;
    for (int a : paper_authors[paper])
      if (!first_active.count(a)) first_active[a] = year;
  };

  // first year: every paper with a seed co-author carries the topic
  std::set<int> seed_pos;
  for (const auto& id : seed_ids) {
    int pos = g.node_index(id);
    if (pos >= 0) seed_pos.insert(pos);
  }
  for (const auto& [paper, authors] : paper_authors) {
    if (*g.node(paper).year != cfg.years.start_year) continue;
    for (int a : authors)
      if (seed_pos.count(a)) {
        tag_paper(paper, cfg.years.start_year);
        break;
      }
  }

  // cumulative distinct co-authors, grown one year at a time
  std::map<int, std::set<int>> coauthors;
  for (int y = cfg.years.start_year; y < cfg.years.end_year; ++y) {
    for (const auto& [paper, authors] : paper_authors) {
      if (*g.node(paper).year != y) continue;
      for (int a : authors)
        for (int b : authors)
          if (a != b) coauthors[a].insert(b);
    }

    std::vector<int> activating;
    for (const auto& [a, cs] : coauthors) {
      if (first_active.count(a) && first_active[a] <= y) continue;
      auto papers_next = by_year[a].find(y + 1);
      if (papers_next == by_year[a].end() || papers_next->second.empty()) continue;
      int active_cos = 0;
      for (int c : cs)
        if (first_active.count(c) && first_active[c] <= y) ++active_cos;
      if (active_cos >= cfg.threshold) activating.push_back(a);
    }
    std::sort(activating.begin(), activating.end(),
              [&](int a, int b) { return g.node(a).id < g.node(b).id; });

    std::set<int> activating_set(activating.begin(), activating.end());
    std::vector<int> to_tag;
    for (int a : activating) {
      int best = -1;
      int best_cost = 1 << 30;
      std::vector<int> papers = by_year[a][y + 1];
      std::sort(papers.begin(), papers.end(),
                [&](int p, int q) { return g.node(p).id < g.node(q).id; });
      for (int p : papers) {
        int cost = 0;
        for (int c : paper_authors[p])
          if (c != a && !(first_active.count(c) && first_active[c] <= y) && !activating_set.count(c)) ++cost;
        if (cost < best_cost) {
          best_cost = cost;
          best = p;
        }
      }
      if (best >= 0) to_tag.push_back(best);
    }
    for (int p : to_tag) tag_paper(p, y + 1);
  }

  for (int p : tagged) g.add_topic(p, topic);
  return g;
}

inline HeteroGraph plant_diffusion(const HeteroGraph& graph, const SynthConfig& cfg) {
  cfg.validate();
  return plant_diffusion_with_seeds(graph, cfg, pick_seed_authors(cfg));
}

}  // namespace hdd
