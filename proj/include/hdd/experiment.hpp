#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hdd/features.hpp"
#include "hdd/hetnet.hpp"
#include "hdd/metapath.hpp"
#include "hdd/metrics.hpp"
#include "hdd/models.hpp"
#include "hdd/synthgen.hpp"

namespace hdd {

struct ModelSpec {
  std::string name;  // arch name, doubles as the report's model column
  ModelConfig config;
};

// Flat key-value configuration with dotted section prefixes. Unknown keys are
// rejected so typos fail fast.
struct ExperimentConfig {
  std::string task = "diffusion";  // diffusion | cascade
  std::string topic;
  std::string nodes_path;
  std::string edges_path;
  bool use_synth = false;
  SynthConfig synth;
  std::vector<std::string> metapaths;
  int year_from = 0;
  int year_to = 0;
  int window_len = 4;
  WindowMode window_mode = WindowMode::cumulative;
  MergeMode merge_mode = MergeMode::concat;
  size_t anchor_cap = 1024;
  std::vector<ModelSpec> models;
  TrainHyper train_hyper;
  uint64_t seed = 1;
  std::string output_dir = "hdd-out";

  std::map<std::string, std::string> raw;  // normalized key -> value, for hashing

  void validate() const {
    if (task != "diffusion" && task != "cascade") throw ConfigError("config: task must be diffusion or cascade");
    if (topic.empty()) throw ConfigError("config: topic is required");
    if (!use_synth && (nodes_path.empty() || edges_path.empty()))
      throw ConfigError("config: either data.nodes/data.edges or synth.* must be given");
    if (metapaths.empty()) throw ConfigError("config: metapaths is required");
    if (year_from > year_to) throw ConfigError("config: years.from exceeds years.to");
    if (window_len < 1) throw ConfigError("config: window.len must be >= 1");
    if (models.empty()) throw ConfigError("config: at least one model is required");
    if (anchor_cap == 0) throw ConfigError("config: anchors.cap must be positive");
    if (use_synth) synth.validate();
  }

  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : raw) s += k + " = " + v + "\n";
    return s;
  }

  uint64_t config_hash() const { return fnv1a64(canonical()); }

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_text(const std::string& text, const std::string& context);
};

namespace experiment_detail {

inline long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long long r = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' needs an integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' needs a number, got '" + v + "'");
  }
}

inline int worker_count() {
  if (const char* env = std::getenv("HDD_THREADS")) {
    int n = static_cast<int>(parse_int("HDD_THREADS", env));
    if (n < 1) throw ConfigError("HDD_THREADS must be >= 1");
    return n;
  }
  return 1;
}

// Runs tasks [0, n) over the worker pool; results must be written into
// preallocated slots so output order never depends on scheduling.
template <typename Fn>
inline void parallel_for(size_t n, Fn&& fn) {
  int workers = std::min<int>(worker_count(), static_cast<int>(n));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace experiment_detail

inline ExperimentConfig ExperimentConfig::parse_text(const std::string& text, const std::string& context) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  size_t lineno = 0;
  for (const auto& raw_line : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(context + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(context + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw ConfigError(context + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  cfg.raw = kv;

  using experiment_detail::parse_int;
  using experiment_detail::parse_real;

  std::set<std::string> consumed;
  auto take = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    consumed.insert(key);
    return &it->second;
  };

  if (auto* v = take("task")) cfg.task = *v;
  if (auto* v = take("topic")) cfg.topic = to_lower_ascii(*v);
  if (auto* v = take("seed")) cfg.seed = static_cast<uint64_t>(parse_int("seed", *v));
  if (auto* v = take("output.dir")) cfg.output_dir = *v;
  if (auto* v = take("data.nodes")) cfg.nodes_path = *v;
  if (auto* v = take("data.edges")) cfg.edges_path = *v;

  if (auto* v = take("synth.authors")) {
    cfg.use_synth = true;
    cfg.synth.n_authors = static_cast<int>(parse_int("synth.authors", *v));
  }
  if (auto* v = take("synth.start_year")) cfg.synth.years.start_year = static_cast<int>(parse_int("synth.start_year", *v));
  if (auto* v = take("synth.end_year")) cfg.synth.years.end_year = static_cast<int>(parse_int("synth.end_year", *v));
  if (auto* v = take("synth.papers_per_year")) cfg.synth.papers_per_year = static_cast<int>(parse_int("synth.papers_per_year", *v));
  if (auto* v = take("synth.authors_min")) cfg.synth.authors_per_paper_min = static_cast<int>(parse_int("synth.authors_min", *v));
  if (auto* v = take("synth.authors_max")) cfg.synth.authors_per_paper_max = static_cast<int>(parse_int("synth.authors_max", *v));
  if (auto* v = take("synth.venues")) cfg.synth.n_venues = static_cast<int>(parse_int("synth.venues", *v));
  if (auto* v = take("synth.seed_fraction")) cfg.synth.seed_fraction = parse_real("synth.seed_fraction", *v);
  if (auto* v = take("synth.threshold")) cfg.synth.threshold = static_cast<int>(parse_int("synth.threshold", *v));
  if (auto* v = take("synth.seed")) cfg.synth.rng_seed = static_cast<uint64_t>(parse_int("synth.seed", *v));
  if (cfg.use_synth) cfg.synth.topic = cfg.topic;

  if (auto* v = take("metapaths")) {
    for (auto& m : split(*v, ',')) {
      std::string t = trim(m);
      if (!t.empty()) cfg.metapaths.push_back(t);
    }
  }
  if (auto* v = take("years.from")) cfg.year_from = static_cast<int>(parse_int("years.from", *v));
  if (auto* v = take("years.to")) cfg.year_to = static_cast<int>(parse_int("years.to", *v));
  if (auto* v = take("window.len")) cfg.window_len = static_cast<int>(parse_int("window.len", *v));
  if (auto* v = take("window.mode")) cfg.window_mode = parse_window_mode(*v);
  if (auto* v = take("features.merge")) cfg.merge_mode = parse_merge_mode(*v);
  if (auto* v = take("anchors.cap")) cfg.anchor_cap = static_cast<size_t>(parse_int("anchors.cap", *v));

  if (auto* v = take("train.epochs")) cfg.train_hyper.epochs = static_cast<int>(parse_int("train.epochs", *v));
  if (auto* v = take("train.batch")) cfg.train_hyper.batch_size = static_cast<int>(parse_int("train.batch", *v));
  if (auto* v = take("train.lr")) cfg.train_hyper.adam.lr = parse_real("train.lr", *v);
  if (auto* v = take("train.patience")) cfg.train_hyper.patience = static_cast<int>(parse_int("train.patience", *v));

  std::vector<std::string> model_names;
  if (auto* v = take("models")) {
    for (auto& m : split(*v, ',')) {
      std::string t = trim(m);
      if (!t.empty()) model_names.push_back(t);
    }
  }
  for (const auto& name : model_names) {
    ModelSpec spec;
    spec.name = name;
    spec.config.arch = parse_arch(name);
    std::string p = "model." + name + ".";
    if (auto* v = take(p + "embed_dim")) spec.config.embed_dim = static_cast<int>(parse_int(p + "embed_dim", *v));
    if (auto* v = take(p + "hidden_dim")) spec.config.hidden_dim = static_cast<int>(parse_int(p + "hidden_dim", *v));
    if (auto* v = take(p + "n_filters")) spec.config.n_filters = static_cast<int>(parse_int(p + "n_filters", *v));
    if (auto* v = take(p + "kernel_width")) spec.config.kernel_width = static_cast<int>(parse_int(p + "kernel_width", *v));
    if (auto* v = take(p + "pool_width")) spec.config.pool_width = static_cast<int>(parse_int(p + "pool_width", *v));
    if (auto* v = take(p + "dropout")) spec.config.dropout_rate = parse_real(p + "dropout", *v);
    spec.config.rng_seed = cfg.seed;
    cfg.models.push_back(spec);
  }

  for (const auto& [k, v] : kv)
    if (!consumed.count(k)) throw ConfigError(context + ": unknown config key '" + k + "'");

  cfg.train_hyper.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  return parse_text(read_text_file(path), path);
}

struct RunResult {
  std::string report_path;
  std::string manifest_path;
  std::vector<MetricRow> rows;
  std::vector<int> skipped_years;
};

namespace experiment_detail {

inline constexpr const char* kCodeVersion = "hdd-0.1.0";

inline std::vector<int> labels_of(const SampleSet& s) {
  std::vector<int> l(s.size());
  for (size_t i = 0; i < s.size(); ++i) l[i] = s.targets[i] > 0.5f ? 1 : 0;
  return l;
}

inline double prevalence(const SampleSet& s) {
  if (s.size() == 0) return 0.0;
  return static_cast<double>(s.positive_count()) / static_cast<double>(s.size());
}

}  // namespace experiment_detail

// Full pipeline: data -> activation -> meta-path snapshots -> features ->
// per-year training and evaluation -> TSV report plus manifest. Output bytes
// are a pure function of the config and seeds.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  cfg.validate();
  fs::create_directories(cfg.output_dir);
  fs::create_directories(cfg.output_dir + "/checkpoints");

  RunResult result;
  std::vector<std::string> manifest_notes;
  std::vector<std::pair<std::string, std::string>> output_files;  // name -> path

  auto finish_manifest = [&](const std::string& status) {
    std::string m;
    m += "config_hash\t" + hex64(cfg.config_hash()) + "\n";
    m += "seed\t" + std::to_string(cfg.seed) + "\n";
    m += std::string("code_version\t") + experiment_detail::kCodeVersion + "\n";
    m += "status\t" + status + "\n";
    for (const auto& note : manifest_notes) m += note + "\n";
    for (const auto& [name, path] : output_files)
      m += "file\t" + name + "\t" + hex64(fnv1a64(read_text_file(path))) + "\n";
    result.manifest_path = cfg.output_dir + "/manifest.tsv";
    write_text_file(result.manifest_path, m);
  };

  try {
    // ---- stage: data ----
    HeteroGraph graph = [&] {
      try {
        if (cfg.use_synth) return plant_diffusion(generate_hetnet(cfg.synth), cfg.synth);
        return load_graph(cfg.nodes_path, cfg.edges_path, Schema::bibliographic());
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError("data", e.what());
      }
    }();

    const bool diffusion = cfg.task == "diffusion";
    ActivationTable activation =
        diffusion ? activation_table(graph, cfg.topic) : paper_activation_table(graph, cfg.topic);

    std::vector<MetaPathSpec> specs;
    for (const auto& m : cfg.metapaths) {
      try {
        specs.push_back(parse_metapath(m, graph.schema()));
      } catch (const std::exception& e) {
        throw StageError("metapaths", e.what());
      }
    }

    // ---- stage: anchors (full-period snapshots rank the universe) ----
    AnchorSet anchors;
    std::vector<Cascade> cascades;
    int data_min_year = 1 << 30;
    try {
      int lo = 1 << 30, hi = -(1 << 30);
      for (const auto& n : graph.nodes())
        if (n.year) {
          lo = std::min(lo, *n.year);
          hi = std::max(hi, *n.year);
        }
      if (lo > hi) throw ConfigError("graph has no timed nodes");
      data_min_year = lo;
      std::vector<MetaPathGraph> full;
      for (const auto& spec : specs) full.push_back(metapath_adjacency(graph, spec, TimeWindow{lo, hi}));
      anchors = build_anchor_set(full, activation, cfg.anchor_cap);
      if (!diffusion) {
        cascades = extract_cascades(graph, cfg.topic);
        if (cascades.empty()) throw StageError("cascades", "no topic cascades in data");
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError("anchors", e.what());
    }

    // ---- stage: folds ----
    struct FoldSlot {
      std::vector<MetricRow> rows;
      bool skipped = false;
      std::string skip_reason;
      std::vector<std::pair<std::string, std::string>> files;
    };
    std::vector<int> years;
    for (int t = cfg.year_from; t <= cfg.year_to; ++t) years.push_back(t);
    std::vector<FoldSlot> slots(years.size());

    experiment_detail::parallel_for(years.size(), [&](size_t yi) {
      int t = years[yi];
      FoldSlot& slot = slots[yi];
      try {
        Split split = diffusion ? make_split(t, cfg.window_len, cfg.window_mode, data_min_year)
                                : make_cascade_split(t, cfg.window_len, cfg.window_mode, data_min_year);

        SampleSet train_set, test_set;            // diffusion task
        SampleSet train_sizes, test_sizes;        // cascade task
        SampleSet train_adopt, test_adopt;
        if (diffusion) {
          auto series_for = [&](const FoldWindows& fold) {
            std::vector<std::vector<MetaPathGraph>> series;
            for (const auto& spec : specs) series.push_back(snapshot_series(graph, spec, fold.feature_windows));
            return series;
          };
          train_set = build_diffusion_samples(series_for(split.train), activation, split.train, anchors,
                                              cfg.merge_mode);
          test_set = build_diffusion_samples(series_for(split.test), activation, split.test, anchors,
                                             cfg.merge_mode);
          if (train_set.positive_count() == 0 || test_set.positive_count() == 0) {
            slot.skipped = true;
            slot.skip_reason = train_set.positive_count() == 0 ? "no train positives" : "no test positives";
            return;
          }
        } else {
          auto cascade_samples_for = [&](const FoldWindows& fold) {
            std::vector<std::vector<MetaPathGraph>> member_series, candidate_series;
            // candidate features cover up to the candidates' appearance year
            std::vector<TimeWindow> cand_windows = fold.feature_windows;
            int shift = fold.label_year - fold.boundary_year;
            for (auto& w : cand_windows) {
              w.end_year += shift;
              if (cfg.window_mode == WindowMode::sliding) w.start_year += shift;
            }
            for (const auto& spec : specs) {
              member_series.push_back(snapshot_series(graph, spec, fold.feature_windows));
              candidate_series.push_back(snapshot_series(graph, spec, cand_windows));
            }
            return build_cascade_samples(graph, cfg.topic, cascades, member_series, candidate_series, fold,
                                         anchors, cfg.merge_mode);
          };
          CascadeSamples train_cs = cascade_samples_for(split.train);
          CascadeSamples test_cs = cascade_samples_for(split.test);
          train_sizes = std::move(train_cs.sizes);
          test_sizes = std::move(test_cs.sizes);
          train_adopt = std::move(train_cs.adopters);
          test_adopt = std::move(test_cs.adopters);
          if (train_sizes.size() == 0 || test_sizes.size() == 0 || test_adopt.size() == 0 ||
              train_adopt.positive_count() == 0 || test_adopt.positive_count() == 0) {
            slot.skipped = true;
            slot.skip_reason = "degenerate cascade fold";
            return;
          }
        }

        for (const auto& mspec : cfg.models) {
          if (diffusion) {
            ModelConfig mc = mspec.config;
            mc.head = TaskHead::sigmoid_binary;
            Model model(mc, train_set.steps, static_cast<int>(train_set.step_dim()));
            auto [tr, val] = split_validation(train_set);
            if (tr.size() == 0 || tr.positive_count() == 0) {
              tr = train_set;
              val = SampleSet{};
            }
            TrainHyper hyper = cfg.train_hyper;
            hyper.seed = cfg.seed ^ fnv1a64(mspec.name) ^ static_cast<uint64_t>(t);
            train(model, tr, val, hyper);

            auto scores = predict(model, test_set);
            auto labels = experiment_detail::labels_of(test_set);
            auto ranked = RankedPredictions::ranked(scores, labels, test_set.ids);
            auto conf = confusion_counts(labels, predict_at_threshold(scores, 0.5));
            slot.rows.push_back({t, mspec.name, "aupr", aupr(ranked)});
            slot.rows.push_back({t, mspec.name, "ap", average_precision(ranked)});
            slot.rows.push_back({t, mspec.name, "precision", conf.precision});
            slot.rows.push_back({t, mspec.name, "recall", conf.recall});

            std::string ck = cfg.output_dir + "/checkpoints/" + mspec.name + "_" + std::to_string(t) + ".hddw";
            model.params().save_checkpoint(ck);
            write_text_file(ck + ".cfg", model_config_sidecar(mc, train_set.steps,
                                                              static_cast<int>(train_set.step_dim())));
            slot.files.emplace_back("checkpoints/" + mspec.name + "_" + std::to_string(t) + ".hddw", ck);
          } else {
            // size regression
            ModelConfig mc = mspec.config;
            mc.head = TaskHead::linear_regression;
            Model size_model(mc, train_sizes.steps, static_cast<int>(train_sizes.step_dim()));
            TrainHyper hyper = cfg.train_hyper;
            hyper.seed = cfg.seed ^ fnv1a64(mspec.name + ".size") ^ static_cast<uint64_t>(t);
            train(size_model, train_sizes, SampleSet{}, hyper);
            auto size_pred = predict(size_model, test_sizes);
            std::vector<double> size_true(test_sizes.targets.begin(), test_sizes.targets.end());
            slot.rows.push_back({t, mspec.name, "mse", mse(size_pred, size_true)});

            // adopter ranking
            ModelConfig ac = mspec.config;
            ac.head = TaskHead::sigmoid_binary;
            Model adopt_model(ac, train_adopt.steps, static_cast<int>(train_adopt.step_dim()));
            TrainHyper ahyper = cfg.train_hyper;
            ahyper.seed = cfg.seed ^ fnv1a64(mspec.name + ".adopt") ^ static_cast<uint64_t>(t);
            auto [atr, aval] = split_validation(train_adopt);
            if (atr.size() == 0 || atr.positive_count() == 0) {
              atr = train_adopt;
              aval = SampleSet{};
            }
            train(adopt_model, atr, aval, ahyper);
            auto adopt_scores = predict(adopt_model, test_adopt);
            auto adopt_labels = experiment_detail::labels_of(test_adopt);
            slot.rows.push_back(
                {t, mspec.name, "ap", average_precision(RankedPredictions::ranked(adopt_scores, adopt_labels,
                                                                                  test_adopt.ids))});

            std::string ck = cfg.output_dir + "/checkpoints/" + mspec.name + "_" + std::to_string(t) + ".hddw";
            size_model.params().save_checkpoint(ck);
            write_text_file(ck + ".cfg", model_config_sidecar(mc, train_sizes.steps,
                                                              static_cast<int>(train_sizes.step_dim())));
            slot.files.emplace_back("checkpoints/" + mspec.name + "_" + std::to_string(t) + ".hddw", ck);
          }
        }

        // rank-free baseline: expected area of a random ranking
        if (diffusion)
          slot.rows.push_back({t, "baseline", "aupr", experiment_detail::prevalence(test_set)});
        else
          slot.rows.push_back({t, "baseline", "ap", experiment_detail::prevalence(test_adopt)});
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError("fold " + std::to_string(t), e.what());
      }
    });

    for (size_t yi = 0; yi < years.size(); ++yi) {
      if (slots[yi].skipped) {
        result.skipped_years.push_back(years[yi]);
        manifest_notes.push_back("skipped_fold\t" + std::to_string(years[yi]) + "\t" + slots[yi].skip_reason);
        continue;
      }
      for (auto& r : slots[yi].rows) result.rows.push_back(r);
      for (auto& f : slots[yi].files) output_files.push_back(f);
    }
    std::sort(result.rows.begin(), result.rows.end(), metric_row_order);
    std::sort(output_files.begin(), output_files.end());

    std::string report = "year\tmodel\tmetric\tvalue\n";
    for (const auto& r : result.rows) report += r.tsv() + "\n";
    result.report_path = cfg.output_dir + "/report.tsv";
    write_text_file(result.report_path, report);
    output_files.emplace_back("report.tsv", result.report_path);
    std::sort(output_files.begin(), output_files.end());

    finish_manifest("ok");
    return result;
  } catch (const StageError& e) {
    manifest_notes.push_back(std::string("error\t") + e.stage_name + "\t" + e.what());
    finish_manifest("failed");
    throw;
  } catch (const std::exception& e) {
    manifest_notes.push_back(std::string("error\tunknown\t") + e.what());
    finish_manifest("failed");
    throw StageError("run", e.what());
  }
}

// Merges long-format reports into one TSV sorted by (task, topic, model, year)
// and appends per-model means. Conflicting duplicate rows are an error.
struct PlotData {
  std::string merged;   // TSV body
  std::string summary;  // per-model means
};

inline PlotData emit_plot_data(const std::vector<std::string>& report_paths, const std::string& task,
                               const std::string& topic) {
  struct Key {
    std::string task, topic, model, metric;
    int year;
    bool operator<(const Key& o) const {
      if (task != o.task) return task < o.task;
      if (topic != o.topic) return topic < o.topic;
      if (model != o.model) return model < o.model;
      if (year != o.year) return year < o.year;
      return metric < o.metric;
    }
  };
  std::map<Key, std::string> rows;
  for (const auto& path : report_paths) {
    std::string text = read_text_file(path);
    size_t lineno = 0;
    for (const auto& line : split(text, '\n')) {
      ++lineno;
      if (line.empty()) continue;
      if (lineno == 1) {
        if (line != "year\tmodel\tmetric\tvalue")
          throw ConfigError(path + ": unexpected report header '" + line + "'");
        continue;
      }
      auto cols = split(line, '\t');
      if (cols.size() != 4) throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
      Key key{task, topic, cols[1], cols[2], static_cast<int>(experiment_detail::parse_int("year", cols[0]))};
      auto [it, inserted] = rows.emplace(key, cols[3]);
      if (!inserted && it->second != cols[3])
        throw ConfigError("conflicting duplicate row for (" + task + ", " + topic + ", " + cols[1] + ", " +
                          cols[0] + ", " + cols[2] + ")");
    }
  }

  PlotData out;
  out.merged = "task\ttopic\tmodel\tyear\tmetric\tvalue\n";
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;  // (model, metric) -> (sum, n)
  for (const auto& [k, v] : rows) {
    out.merged += k.task + "\t" + k.topic + "\t" + k.model + "\t" + std::to_string(k.year) + "\t" + k.metric +
                  "\t" + v + "\n";
    auto& acc = sums[{k.model, k.metric}];
    acc.first += std::stod(v);
    acc.second += 1;
  }
  out.summary = "model\tmetric\tmean\tn\n";
  for (const auto& [mk, acc] : sums)
    out.summary += mk.first + "\t" + mk.second + "\t" + format_fixed(acc.first / acc.second, 6) + "\t" +
                   std::to_string(acc.second) + "\n";
  return out;
}

}  // namespace hdd
