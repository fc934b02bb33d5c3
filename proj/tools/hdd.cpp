// Command-line front end for the diffusion/cascade pipeline. Every subcommand
// is driven by the same flat key-value config file; --seed overrides the
// config seed. Exit codes: 0 success, 2 config error, 3 stage failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdd/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  long long seed_override = -1;
};

hdd::ExperimentConfig load_config(const CommonArgs& args) {
  if (args.config_path.empty()) throw hdd::ConfigError("--config is required");
  auto cfg = hdd::ExperimentConfig::parse_file(args.config_path);
  if (args.seed_override >= 0) {
    cfg.seed = static_cast<uint64_t>(args.seed_override);
    cfg.train_hyper.seed = cfg.seed;
    for (auto& m : cfg.models) m.config.rng_seed = cfg.seed;
    cfg.raw["seed"] = std::to_string(cfg.seed);
  }
  return cfg;
}

hdd::HeteroGraph load_or_synth(const hdd::ExperimentConfig& cfg) {
  if (cfg.use_synth) return hdd::plant_diffusion(hdd::generate_hetnet(cfg.synth), cfg.synth);
  return hdd::load_graph(cfg.nodes_path, cfg.edges_path, hdd::Schema::bibliographic());
}

int cmd_ingest(const CommonArgs& args) {
  auto cfg = load_config(args);
  auto g = hdd::load_graph(cfg.nodes_path, cfg.edges_path, hdd::Schema::bibliographic());
  std::map<std::string, size_t> by_type;
  for (const auto& n : g.nodes()) ++by_type[n.type];
  std::printf("nodes\t%zu\n", g.node_count());
  for (const auto& [t, n] : by_type) std::printf("nodes.%s\t%zu\n", t.c_str(), n);
  std::printf("edges\t%zu\n", g.edge_count());
  fs::create_directories(cfg.output_dir);
  hdd::save_graph(g, cfg.output_dir + "/nodes.tsv", cfg.output_dir + "/edges.tsv");
  std::printf("canonical copy written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_synth(const CommonArgs& args) {
  auto cfg = load_config(args);
  if (!cfg.use_synth) throw hdd::ConfigError("synth subcommand needs synth.* keys in the config");
  auto g = hdd::plant_diffusion(hdd::generate_hetnet(cfg.synth), cfg.synth);
  fs::create_directories(cfg.output_dir);
  hdd::save_graph(g, cfg.output_dir + "/nodes.tsv", cfg.output_dir + "/edges.tsv");
  std::printf("synthetic graph: %zu nodes, %zu edges -> %s\n", g.node_count(), g.edge_count(),
              cfg.output_dir.c_str());
  return 0;
}

int cmd_metapath(const CommonArgs& args) {
  auto cfg = load_config(args);
  auto g = load_or_synth(cfg);
  int lo = 1 << 30, hi = -(1 << 30);
  for (const auto& n : g.nodes())
    if (n.year) {
      lo = std::min(lo, *n.year);
      hi = std::max(hi, *n.year);
    }
  if (lo > hi) throw hdd::StageError("metapath", "graph has no timed nodes");
  fs::create_directories(cfg.output_dir);
  for (const auto& text : cfg.metapaths) {
    auto spec = hdd::parse_metapath(text, g.schema());
    auto mpg = hdd::metapath_adjacency(g, spec, hdd::TimeWindow{lo, hi});
    std::string base = cfg.output_dir + "/" + spec.name;
    hdd::save_metapath_graph(mpg, base + ".edges.tsv", base + ".index.tsv");
    std::printf("%s\t%zu vertices\t%zu weighted edges\n", spec.name.c_str(), mpg.vertex_ids.size(),
                mpg.adjacency.nnz());
  }
  return 0;
}

int cmd_featurize(const CommonArgs& args) {
  auto cfg = load_config(args);
  if (cfg.task != "diffusion")
    throw hdd::ConfigError("featurize currently writes diffusion sample sets; use run for cascade outputs");
  auto g = load_or_synth(cfg);
  auto activation = hdd::activation_table(g, cfg.topic);
  std::vector<hdd::MetaPathSpec> specs;
  for (const auto& m : cfg.metapaths) specs.push_back(hdd::parse_metapath(m, g.schema()));

  int lo = 1 << 30, hi = -(1 << 30);
  for (const auto& n : g.nodes())
    if (n.year) {
      lo = std::min(lo, *n.year);
      hi = std::max(hi, *n.year);
    }
  std::vector<hdd::MetaPathGraph> full;
  for (const auto& spec : specs) full.push_back(hdd::metapath_adjacency(g, spec, hdd::TimeWindow{lo, hi}));
  auto anchors = hdd::build_anchor_set(full, activation, cfg.anchor_cap);

  fs::create_directories(cfg.output_dir + "/features");
  for (int t = cfg.year_from; t <= cfg.year_to; ++t) {
    auto split = hdd::make_split(t, cfg.window_len, cfg.window_mode, lo);
    for (const auto& [fold, tag] :
         {std::pair{&split.train, "train"}, std::pair{&split.test, "test"}}) {
      std::vector<std::vector<hdd::MetaPathGraph>> series;
      for (const auto& spec : specs) series.push_back(hdd::snapshot_series(g, spec, fold->feature_windows));
      auto set = hdd::build_diffusion_samples(series, activation, *fold, anchors, cfg.merge_mode);
      std::string base = cfg.output_dir + "/features/t" + std::to_string(t) + "_" + tag;
      set.save(base + ".features.bin", base + ".labels.tsv");
      std::printf("t=%d %s\t%zu samples\t%zu positives\n", t, tag, set.size(), set.positive_count());
    }
  }
  return 0;
}

int cmd_run(const CommonArgs& args) {
  auto cfg = load_config(args);
  auto result = hdd::run_experiment(cfg);
  std::printf("report: %s\n", result.report_path.c_str());
  std::printf("manifest: %s\n", result.manifest_path.c_str());
  for (int y : result.skipped_years) std::printf("skipped fold %d\n", y);
  return 0;
}

int cmd_train(const CommonArgs& args) { return cmd_run(args); }

int cmd_evaluate(const CommonArgs& args) {
  auto cfg = load_config(args);
  auto result = hdd::run_experiment(cfg);
  for (const auto& row : result.rows) std::printf("%s\n", row.tsv().c_str());
  return 0;
}

int cmd_report(const CommonArgs& args, const std::vector<std::string>& inputs) {
  auto cfg = load_config(args);
  if (inputs.empty()) throw hdd::ConfigError("report needs at least one report.tsv path");
  auto plot = hdd::emit_plot_data(inputs, cfg.task, cfg.topic);
  fs::create_directories(cfg.output_dir);
  hdd::write_text_file(cfg.output_dir + "/merged.tsv", plot.merged);
  hdd::write_text_file(cfg.output_dir + "/summary.tsv", plot.summary);
  std::printf("merged: %s/merged.tsv\nsummary: %s/summary.tsv\n", cfg.output_dir.c_str(),
              cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous-network diffusion and cascade prediction pipeline"};
  app.require_subcommand(1);

  CommonArgs common;
  std::vector<std::string> report_inputs;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "experiment config file");
    sub->add_option("--seed", common.seed_override, "override the config seed");
  };

  auto* ingest = app.add_subcommand("ingest", "validate a TSV dataset and write a canonical copy");
  auto* synth = app.add_subcommand("synth", "generate a synthetic planted-diffusion dataset");
  auto* metapath = app.add_subcommand("metapath", "compute meta-path projection graphs");
  auto* featurize = app.add_subcommand("featurize", "write per-fold feature tensors and labels");
  auto* train = app.add_subcommand("train", "train models over the configured year sweep");
  auto* evaluate = app.add_subcommand("evaluate", "train and print metric rows");
  auto* run = app.add_subcommand("run", "full pipeline: data, features, training, report");
  auto* report = app.add_subcommand("report", "merge report files into plot-ready TSV");
  for (auto* sub : {ingest, synth, metapath, featurize, train, evaluate, run, report}) add_common(sub);
  report->add_option("inputs", report_inputs, "report.tsv files to merge");

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) return cmd_ingest(common);
    if (synth->parsed()) return cmd_synth(common);
    if (metapath->parsed()) return cmd_metapath(common);
    if (featurize->parsed()) return cmd_featurize(common);
    if (train->parsed()) return cmd_train(common);
    if (evaluate->parsed()) return cmd_evaluate(common);
    if (run->parsed()) return cmd_run(common);
    if (report->parsed()) return cmd_report(common, report_inputs);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const hdd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const hdd::StageError& e) {
    std::fprintf(stderr, "stage failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
