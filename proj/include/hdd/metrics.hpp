#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hdd/common.hpp"

namespace hdd {

// Scored binary items under a fixed total order: score descending, then id
// ascending, so equal scores never make a metric depend on input order.
struct RankedPredictions {
  struct Item {
    double score = 0.0;
    int label = 0;
    std::string id;
  };
  std::vector<Item> items;

  static RankedPredictions ranked(const std::vector<double>& scores, const std::vector<int>& labels,
                                  const std::vector<std::string>& ids) {
    if (scores.size() != labels.size() || (!ids.empty() && ids.size() != scores.size()))
      throw std::invalid_argument("ranked: length mismatch");
    RankedPredictions r;
    r.items.reserve(scores.size());
    for (size_t i = 0; i < scores.size(); ++i)
      r.items.push_back({scores[i], labels[i], ids.empty() ? std::to_string(i) : ids[i]});
    std::sort(r.items.begin(), r.items.end(), [](const Item& a, const Item& b) {
      return a.score != b.score ? a.score > b.score : a.id < b.id;
    });
    return r;
  }

  size_t positives() const {
    size_t p = 0;
    for (const auto& it : items) p += static_cast<size_t>(it.label != 0);
    return p;
  }
};

struct Confusion {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  bool degenerate = false;  // a zero denominator was replaced by 0
};

inline Confusion confusion_counts(const std::vector<int>& labels, const std::vector<int>& predictions) {
  if (labels.size() != predictions.size()) throw std::invalid_argument("confusion_counts: length mismatch");
  Confusion c;
  for (size_t i = 0; i < labels.size(); ++i) {
    bool l = labels[i] != 0, p = predictions[i] != 0;
    if (l && p) ++c.tp;
    else if (!l && p) ++c.fp;
    else if (l && !p) ++c.fn;
    else ++c.tn;
  }
  if (c.tp + c.fp > 0) c.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  else c.degenerate = true;
  if (c.tp + c.fn > 0) c.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  else c.degenerate = true;
  return c;
}

inline std::vector<int> predict_at_threshold(const std::vector<double>& scores, double threshold) {
  std::vector<int> out(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= threshold ? 1 : 0;
  return out;
}

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// One (recall, precision) point per rank prefix.
inline std::vector<PrPoint> pr_curve(const RankedPredictions& ranked) {
  size_t pos = ranked.positives();
  if (pos == 0) throw std::invalid_argument("pr_curve: no positive labels");
  std::vector<PrPoint> out;
  out.reserve(ranked.items.size());
  long long tp = 0;
  for (size_t k = 0; k < ranked.items.size(); ++k) {
    tp += ranked.items[k].label != 0;
    out.push_back({static_cast<double>(tp) / static_cast<double>(pos),
                   static_cast<double>(tp) / static_cast<double>(k + 1)});
  }
  return out;
}

// Step-weighted mean of precisions at each recall increment.
inline double average_precision(const RankedPredictions& ranked) {
  auto points = pr_curve(ranked);
  double ap = 0.0, prev_recall = 0.0;
  for (const auto& p : points) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

// Trapezoidal area under the prefix PR points, anchored at (0, first precision).
inline double aupr(const RankedPredictions& ranked) {
  auto points = pr_curve(ranked);
  double area = 0.0;
  double prev_recall = 0.0, prev_precision = points.front().precision;
  for (const auto& p : points) {
    area += (p.recall - prev_recall) * 0.5 * (p.precision + prev_precision);
    prev_recall = p.recall;
    prev_precision = p.precision;
  }
  return area;
}

inline double mse(const std::vector<double>& predictions, const std::vector<double>& targets) {
  if (predictions.empty()) throw std::invalid_argument("mse: empty input");
  if (predictions.size() != targets.size()) throw std::invalid_argument("mse: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - targets[i];
    s += d * d;
  }
  return s / static_cast<double>(predictions.size());
}

// Long-format metric rows, serialized as `year\tmodel\tmetric\tvalue`.
struct MetricRow {
  int year = 0;
  std::string model;
  std::string metric;
  double value = 0.0;

  std::string tsv() const {
    return std::to_string(year) + "\t" + model + "\t" + metric + "\t" + format_fixed(value, 6);
  }
};

inline bool metric_row_order(const MetricRow& a, const MetricRow& b) {
  if (a.year != b.year) return a.year < b.year;
  if (a.model != b.model) return a.model < b.model;
  return a.metric < b.metric;
}

}  // namespace hdd
