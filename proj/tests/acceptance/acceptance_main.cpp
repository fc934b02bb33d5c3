// Acceptance suite: one criterion per subcommand, one PASS/FAIL line each.
// Usage: acceptance [a1|a2|a3|a4|a5|a6|a7|a8|all]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "hdd/experiment.hpp"
#include "../oracle/metapath_oracle.hpp"

using namespace hdd;
namespace fs = std::filesystem;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
  void note(const std::string& info) {
    if (!detail.empty()) detail += "; ";
    detail += info;
  }
};

std::string scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hdd_acceptance_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

// ---------------------------------------------------------------------------
// A1/A2: planted-diffusion recovery experiment
// ---------------------------------------------------------------------------

// 500 authors in 48 venue communities (core-periphery), eight years,
// threshold 2, 5% seeds in the core.
std::string planted_config(const std::string& outdir) {
  return "task = diffusion\n"
         "topic = planted\n"
         "seed = 1\n"
         "synth.authors = 500\n"
         "synth.start_year = 2000\n"
         "synth.end_year = 2007\n"
         "synth.papers_per_year = 700\n"
         "synth.authors_min = 1\n"
         "synth.authors_max = 3\n"
         "synth.venues = 48\n"
         "synth.seed_fraction = 0.05\n"
         "synth.threshold = 2\n"
         "synth.seed = 1\n"
         "metapaths = APA,APAPA\n"
         "years.from = 2004\n"
         "years.to = 2006\n"
         "window.len = 4\n"
         "anchors.cap = 128\n"
         "models = mlp,cnn,lstm,cnn_lstm\n"
         "model.mlp.hidden_dim = 32\n"
         "model.mlp.dropout = 0.1\n"
         "model.cnn.hidden_dim = 32\n"
         "model.cnn.n_filters = 8\n"
         "model.cnn.dropout = 0.1\n"
         "model.lstm.embed_dim = 32\n"
         "model.lstm.hidden_dim = 32\n"
         "model.lstm.dropout = 0.1\n"
         "model.cnn_lstm.embed_dim = 32\n"
         "model.cnn_lstm.hidden_dim = 32\n"
         "model.cnn_lstm.n_filters = 8\n"
         "model.cnn_lstm.dropout = 0.1\n"
         "train.epochs = 40\n"
         "train.batch = 16\n"
         "train.lr = 0.003\n"
         "train.patience = 10\n"
         "output.dir = " +
         outdir + "\n";
}

struct PlantedRun {
  RunResult result;
  double seconds = 0;
  std::map<std::pair<std::string, int>, double> aupr;  // (model, year)
  std::map<int, double> baseline;
  std::set<int> years;
};

PlantedRun run_planted() {
  auto dir = scratch_dir("planted");
  auto cfg = ExperimentConfig::parse_text(planted_config(dir), "planted");
  double t0 = now_seconds();
  PlantedRun run;
  run.result = run_experiment(cfg);
  run.seconds = now_seconds() - t0;
  for (const auto& row : run.result.rows) {
    if (row.metric != "aupr") continue;
    if (row.model == "baseline") {
      run.baseline[row.year] = row.value;
    } else {
      run.aupr[{row.model, row.year}] = row.value;
      run.years.insert(row.year);
    }
  }
  return run;
}

Outcome criterion_a1() {
  Outcome out;
  auto run = run_planted();
  out.require(!run.years.empty(), "every fold was skipped");
  char buf[160];
  for (int year : run.years) {
    for (const char* deep : {"lstm", "cnn_lstm"}) {
      double v = run.aupr.at({deep, year});
      std::snprintf(buf, sizeof(buf), "%s@%d aupr %.3f", deep, year, v);
      out.require(v >= 0.90, std::string(buf) + " < 0.90");
    }
    double base = run.baseline.at(year);
    for (const char* model : {"mlp", "cnn", "lstm", "cnn_lstm"}) {
      double v = run.aupr.at({model, year});
      std::snprintf(buf, sizeof(buf), "%s@%d aupr %.3f vs baseline %.3f", model, year, v, base);
      out.require(v >= base + 0.3, std::string(buf) + " margin < 0.3");
    }
  }
  std::snprintf(buf, sizeof(buf), "%zu folds, %.0fs", run.years.size(), run.seconds);
  out.note(buf);
  out.require(run.seconds < 300.0, "run exceeded 5 minutes");
  return out;
}

Outcome criterion_a2() {
  Outcome out;
  auto run = run_planted();
  out.require(!run.years.empty(), "every fold was skipped");
  auto mean = [&](const char* model) {
    double s = 0;
    for (int y : run.years) s += run.aupr.at({model, y});
    return s / static_cast<double>(run.years.size());
  };
  double mlp = mean("mlp"), lstm = mean("lstm"), cnn_lstm = mean("cnn_lstm");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "mean aupr mlp %.3f lstm %.3f cnn_lstm %.3f", mlp, lstm, cnn_lstm);
  out.note(buf);
  out.require(lstm >= mlp - 0.02, "lstm below mlp - 0.02");
  out.require(cnn_lstm >= mlp - 0.02, "cnn_lstm below mlp - 0.02");
  return out;
}

// ---------------------------------------------------------------------------
// A3: meta-path projections equal exhaustive enumeration
// ---------------------------------------------------------------------------

Outcome criterion_a3() {
  Outcome out;
  double t0 = now_seconds();
  auto specs = oracle::all_specs(Schema::bibliographic(), 5);
  out.require(specs.size() >= 8, "spec enumeration looks broken");
  size_t checked = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = oracle::random_graph(seed);
    TimeWindow window{2000 + static_cast<int>(seed % 3), 2001 + static_cast<int>(seed % 4)};
    for (const auto& spec : specs) {
      auto mpg = metapath_adjacency(g, spec, window);
      if (!oracle::matches(mpg, oracle::count_walks(g, spec, window))) {
        out.require(false, "mismatch at seed " + std::to_string(seed) + " spec " + spec.name);
        return out;
      }
      ++checked;
    }
  }
  double secs = now_seconds() - t0;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%zu projections over 100 graphs x %zu specs, %.1fs", checked, specs.size(),
                secs);
  out.note(buf);
  out.require(secs < 60.0, "exceeded 60s");
  return out;
}

// ---------------------------------------------------------------------------
// A4: gradient fidelity
// ---------------------------------------------------------------------------

// Zero-initialized biases put relu preactivations exactly on the kink (a dead
// hidden vector feeds 0 into the next layer), where the loss is not
// differentiable and central differences are meaningless. All checks therefore
// evaluate at a generic point: every parameter jittered off its init.
void jitter_params(ParamStore& store, uint64_t seed) {
  auto rng = RngStream::keyed(seed, "jitter");
  for (auto& e : store.entries())
    for (double& v : e.value.data) v += rng.next_symmetric(0.05);
}

// max relative error between analytic grads (already in store) and central
// differences of `loss` over every parameter coordinate
template <typename LossFn>
double numeric_vs_analytic(ParamStore& store, LossFn loss, double eps) {
  double worst = 0;
  for (auto& e : store.entries()) {
    for (size_t i = 0; i < e.value.size(); ++i) {
      double saved = e.value.data[i];
      e.value.data[i] = saved + eps;
      double up = loss();
      e.value.data[i] = saved - eps;
      double down = loss();
      e.value.data[i] = saved;
      double numeric = (up - down) / (2 * eps);
      double rel = std::abs(e.grad.data[i] - numeric) /
                   std::max({std::abs(e.grad.data[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

double check_dense(uint64_t seed) {
  ParamStore store;
  auto init = RngStream::keyed(seed, "dense-init");
  DenseLayer layer(store, "d", 6, 4, false, init);
  jitter_params(store, seed);
  auto rng = RngStream::keyed(seed, "dense-data");
  Tensor2D x(3, 6), target(3, 4);
  for (double& v : x.data) v = rng.next_symmetric(1.0);
  for (double& v : target.data) v = rng.next_symmetric(1.0);
  auto loss = [&] {
    Tensor2D y = layer.forward(x);
    double s = 0;
    for (size_t i = 0; i < y.size(); ++i) s += (y.data[i] - target.data[i]) * (y.data[i] - target.data[i]);
    return s / static_cast<double>(y.size());
  };
  store.zero_grads();
  Tensor2D y = layer.forward(x);
  Tensor2D d(y.rows, y.cols);
  for (size_t i = 0; i < y.size(); ++i)
    d.data[i] = 2.0 * (y.data[i] - target.data[i]) / static_cast<double>(y.size());
  layer.backward(d);
  return numeric_vs_analytic(store, loss, 1e-5);
}

double check_conv(uint64_t seed) {
  ParamStore store;
  auto init = RngStream::keyed(seed, "conv-init");
  Conv1dReluPool layer(store, "c", 24, 2, 5, 4, init);
  jitter_params(store, seed);
  auto rng = RngStream::keyed(seed, "conv-data");
  Tensor2D x(3, 24);
  for (double& v : x.data) v = rng.next_symmetric(1.5);
  Tensor2D target(3, layer.output_dim());
  for (double& v : target.data) v = rng.next_symmetric(1.0);
  auto loss = [&] {
    Tensor2D y = layer.forward(x);
    double s = 0;
    for (size_t i = 0; i < y.size(); ++i) s += (y.data[i] - target.data[i]) * (y.data[i] - target.data[i]);
    return s / static_cast<double>(y.size());
  };
  store.zero_grads();
  Tensor2D y = layer.forward(x);
  Tensor2D d(y.rows, y.cols);
  for (size_t i = 0; i < y.size(); ++i)
    d.data[i] = 2.0 * (y.data[i] - target.data[i]) / static_cast<double>(y.size());
  layer.backward(d);
  return numeric_vs_analytic(store, loss, 1e-5);
}

double check_lstm(uint64_t seed) {
  ParamStore store;
  auto init = RngStream::keyed(seed, "lstm-init");
  LstmLayer layer(store, "l", 5, 4, init);
  jitter_params(store, seed);
  auto rng = RngStream::keyed(seed, "lstm-data");
  std::vector<Tensor2D> xs(4, Tensor2D(3, 5));  // 4-step BPTT
  for (auto& x : xs)
    for (double& v : x.data) v = rng.next_symmetric(1.0);
  Tensor2D target(3, 4);
  for (double& v : target.data) v = rng.next_symmetric(0.5);
  auto loss = [&] {
    Tensor2D h = layer.forward(xs);
    double s = 0;
    for (size_t i = 0; i < h.size(); ++i) s += (h.data[i] - target.data[i]) * (h.data[i] - target.data[i]);
    return s / static_cast<double>(h.size());
  };
  store.zero_grads();
  Tensor2D h = layer.forward(xs);
  Tensor2D d(h.rows, h.cols);
  for (size_t i = 0; i < h.size(); ++i)
    d.data[i] = 2.0 * (h.data[i] - target.data[i]) / static_cast<double>(h.size());
  layer.backward(d);
  return numeric_vs_analytic(store, loss, 1e-5);
}

double check_model(Arch arch, uint64_t seed) {
  ModelConfig cfg;
  cfg.arch = arch;
  cfg.embed_dim = 5;
  cfg.hidden_dim = 4;
  cfg.n_filters = 2;
  cfg.dropout_rate = 0.0;
  cfg.head = TaskHead::sigmoid_binary;
  cfg.rng_seed = seed;
  Model model(cfg, 4, 7);
  jitter_params(model.params(), seed);
  auto rng = RngStream::keyed(seed, "model-data");
  Batch b;
  b.steps = 4;
  b.dim = 7;
  b.x = Tensor2D(5, 28);
  for (double& v : b.x.data) v = rng.next_symmetric(1.0);
  b.targets.resize(5);
  for (double& t : b.targets) t = static_cast<double>(rng.next_below(2));
  return gradient_check(model, b, 1e-5);
}

Outcome criterion_a4() {
  Outcome out;
  double worst = 0;
  std::string worst_where = "none";
  auto track = [&](const std::string& where, double err) {
    if (err > worst) {
      worst = err;
      worst_where = where;
    }
    out.require(err < 1e-4, where + " error " + format_fixed(err, 8));
  };
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    track("dense seed " + std::to_string(seed), check_dense(seed));
    track("conv seed " + std::to_string(seed), check_conv(seed));
    track("lstm seed " + std::to_string(seed), check_lstm(seed));
    for (Arch arch : {Arch::mlp, Arch::cnn, Arch::lstm, Arch::cnn_lstm})
      track(std::string(arch_name(arch)) + " seed " + std::to_string(seed), check_model(arch, seed));
  }
  out.note("worst " + format_fixed(worst, 8) + " at " + worst_where);
  return out;
}

// ---------------------------------------------------------------------------
// A5: LSTM scalar hand oracle
// ---------------------------------------------------------------------------

Outcome criterion_a5() {
  Outcome out;
  Tensor2D W(1, 1), U(1, 1), b(1, 1);
  W.data[0] = 1.0;
  LstmParams p;
  p.W_i = p.W_f = p.W_c = p.W_o = &W;
  p.U_i = p.U_f = p.U_c = p.U_o = &U;
  p.b_i = p.b_f = p.b_c = p.b_o = &b;
  Tensor2D x(1, 1), h(1, 1), c(1, 1);
  c.data[0] = 2.0;
  auto s = lstm_cell_step(p, x, h, c);
  double want = 0.5 * std::tanh(1.0);
  double got = s.h.data[0];
  out.note("h = " + format_fixed(got, 15) + ", expected " + format_fixed(want, 15));
  out.require(std::abs(got - want) < 1e-12, "deviation " + format_fixed(std::abs(got - want), 15));
  out.require(std::abs(s.c.data[0] - 1.0) < 1e-12, "cell state off");
  return out;
}

// ---------------------------------------------------------------------------
// A6: metric oracles
// ---------------------------------------------------------------------------

Outcome criterion_a6() {
  Outcome out;
  // worked example
  auto ranked = RankedPredictions::ranked({0.9, 0.8, 0.1}, {1, 0, 1}, {"a", "b", "c"});
  double ap = average_precision(ranked);
  out.require(std::abs(ap - 5.0 / 6.0) < 1e-12, "worked example AP " + format_fixed(ap, 12));

  auto rng = RngStream::keyed(2024, "a6");
  double worst = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    size_t n = 2 + rng.next_below(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    std::vector<std::string> ids(n);
    for (size_t i = 0; i < n; ++i) {
      scores[i] = rng.next_double() < 0.25 ? 0.5 : rng.next_double();
      labels[i] = rng.next_double() < 0.35 ? 1 : 0;
      ids[i] = "n" + std::to_string(i);
    }
    labels[rng.next_below(n)] = 1;
    auto r = RankedPredictions::ranked(scores, labels, ids);

    // exhaustive prefix enumeration, written out independently
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return ids[a] < ids[b];
    });
    double pos = 0;
    for (int l : labels) pos += l;
    double tp = 0, prev_r = 0, prev_p = 1, want_ap = 0, want_aupr = 0;
    for (size_t k = 0; k < n; ++k) {
      tp += labels[order[k]];
      double rec = tp / pos, prec = tp / static_cast<double>(k + 1);
      if (k == 0) prev_p = prec;
      want_ap += (rec - prev_r) * prec;
      want_aupr += (rec - prev_r) * 0.5 * (prec + prev_p);
      prev_r = rec;
      prev_p = prec;
    }
    worst = std::max(worst, std::abs(average_precision(r) - want_ap));
    worst = std::max(worst, std::abs(aupr(r) - want_aupr));
  }
  out.note("worst deviation " + format_fixed(worst, 15) + " over 1000 instances");
  out.require(worst < 1e-12, "prefix enumeration mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// A7: cascade pipeline
// ---------------------------------------------------------------------------

// Citation fan fixture: P2 and P3 cite P1, P4 cites P3, P5 cites P4.
Outcome fig_fixture_outcome() {
  Outcome out;
  HeteroGraph g(Schema::bibliographic());
  auto paper = [&](const std::string& id, int year) { g.add_node({id, "paper", year, {"t"}, ""}); };
  paper("P1", 2000);
  paper("P2", 2001);
  paper("P3", 2001);
  paper("P4", 2002);
  paper("P5", 2003);
  g.add_edge("P2", "cites", "P1");
  g.add_edge("P3", "cites", "P1");
  g.add_edge("P4", "cites", "P3");
  g.add_edge("P5", "cites", "P4");
  auto cascades = extract_cascades(g, "t");
  out.require(cascades.size() == 1, "expected one cascade");
  if (cascades.size() == 1) {
    const auto& hops = cascades[0].hops;
    std::vector<CascadeHop> want{{"P1", "P1", 0}, {"P2", "P1", 1}, {"P3", "P1", 1}, {"P4", "P3", 1},
                                 {"P5", "P4", 1}};
    out.require(hops == want, "hop sequence differs from the citation fan");
  }
  return out;
}

// Six cascades with constant per-year growth rates 1..6; topic papers chain
// citations inside their cascade and share a per-cascade venue, distractor
// papers cite members but live in a shared noise venue.
HeteroGraph scheduled_tree() {
  HeteroGraph g(Schema::bibliographic());
  const int n_cascades = 6;
  const int y0 = 2000, y1 = 2009;
  for (int j = 0; j < n_cascades; ++j)
    g.add_node({"vt" + std::to_string(j), "venue", std::nullopt, {}, ""});
  g.add_node({"vd", "venue", std::nullopt, {}, ""});

  std::vector<std::vector<std::string>> members(n_cascades);
  auto add_paper = [&](const std::string& id, int year, bool topic, const std::string& venue) {
    g.add_node({id, "paper", year, topic ? std::vector<std::string>{"flow"} : std::vector<std::string>{}, ""});
    g.add_edge(id, "published_in", venue);
  };
  for (int j = 0; j < n_cascades; ++j) {
    std::string root = "c" + std::to_string(j) + "_root";
    add_paper(root, y0, true, "vt" + std::to_string(j));
    members[static_cast<size_t>(j)].push_back(root);
  }
  int distractor_id = 0;
  for (int y = y0 + 1; y <= y1; ++y) {
    for (int j = 0; j < n_cascades; ++j) {
      auto& m = members[static_cast<size_t>(j)];
      size_t previous = m.size();
      int growth = j + 1;
      for (int k = 0; k < growth; ++k) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "c%d_y%d_%02d", j, y, k);
        add_paper(buf, y, true, "vt" + std::to_string(j));
        // chain citation into last year's frontier plus the root
        g.add_edge(buf, "cites", m[previous - 1 - (static_cast<size_t>(k) % previous)]);
        if (previous > 1) g.add_edge(buf, "cites", m[0]);
        m.push_back(buf);
      }
      // two distractors per cascade per year cite a member but never adopt
      for (int k = 0; k < 2; ++k) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "d%04d", distractor_id++);
        add_paper(buf, y, false, "vd");
        g.add_edge(buf, "cites", m[static_cast<size_t>(k) % previous]);
      }
    }
  }
  return g;
}

Outcome criterion_a7() {
  Outcome out = fig_fixture_outcome();

  auto dir = scratch_dir("cascade");
  auto g = scheduled_tree();
  save_graph(g, dir + "/nodes.tsv", dir + "/edges.tsv");

  std::string text =
      "task = cascade\n"
      "topic = flow\n"
      "seed = 3\n"
      "data.nodes = " + dir + "/nodes.tsv\n"
      "data.edges = " + dir + "/edges.tsv\n"
      "metapaths = PCP,PVP\n"
      "years.from = 2006\n"
      "years.to = 2006\n"
      "window.len = 4\n"
      "anchors.cap = 64\n"
      "models = mlp\n"
      "model.mlp.hidden_dim = 16\n"
      "model.mlp.dropout = 0\n"
      "train.epochs = 200\n"
      "train.batch = 8\n"
      "train.lr = 0.01\n"
      "train.patience = 200\n"
      "output.dir = " + dir + "/out\n";
  auto cfg = ExperimentConfig::parse_text(text, "a7");
  auto result = run_experiment(cfg);
  out.require(result.skipped_years.empty(), "cascade fold skipped");

  double mse_val = -1, ap_val = -1;
  for (const auto& row : result.rows) {
    if (row.model != "mlp") continue;
    if (row.metric == "mse") mse_val = row.value;
    if (row.metric == "ap") ap_val = row.value;
  }
  // test targets are the per-cascade growth rates 1..6
  std::vector<double> targets{1, 2, 3, 4, 5, 6};
  double mean = 3.5, var = 0;
  for (double t : targets) var += (t - mean) * (t - mean);
  var /= targets.size();
  char buf[120];
  std::snprintf(buf, sizeof(buf), "mse %.3f (target var %.3f), adopter ap %.3f", mse_val, var, ap_val);
  out.note(buf);
  out.require(mse_val >= 0 && mse_val <= 0.5 * var, "regression R^2 below 0.5");
  out.require(ap_val >= 0.8, "adopter AP below 0.8");
  return out;
}

// ---------------------------------------------------------------------------
// A8: byte-identical reruns
// ---------------------------------------------------------------------------

std::string a8_config(const std::string& outdir) {
  return "task = diffusion\n"
         "topic = planted\n"
         "seed = 11\n"
         "synth.authors = 120\n"
         "synth.start_year = 2000\n"
         "synth.end_year = 2006\n"
         "synth.papers_per_year = 90\n"
         "synth.authors_min = 2\n"
         "synth.authors_max = 3\n"
         "synth.venues = 12\n"
         "synth.seed_fraction = 0.08\n"
         "synth.threshold = 2\n"
         "synth.seed = 2\n"
         "metapaths = APA,APAPA\n"
         "years.from = 2004\n"
         "years.to = 2005\n"
         "window.len = 4\n"
         "anchors.cap = 48\n"
         "models = lstm,mlp\n"
         "model.lstm.embed_dim = 16\n"
         "model.lstm.hidden_dim = 16\n"
         "model.lstm.dropout = 0.5\n"
         "model.mlp.hidden_dim = 16\n"
         "model.mlp.dropout = 0.5\n"
         "train.epochs = 6\n"
         "output.dir = " +
         outdir + "\n";
}

Outcome criterion_a8() {
  Outcome out;
  auto d1 = scratch_dir("rerun1");
  auto d2 = scratch_dir("rerun2");
  auto r1 = run_experiment(ExperimentConfig::parse_text(a8_config(d1), "a8"));
  auto r2 = run_experiment(ExperimentConfig::parse_text(a8_config(d2), "a8"));

  out.require(read_text_file(r1.report_path) == read_text_file(r2.report_path), "report bytes differ");

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(d1 + "/checkpoints"))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  out.require(!names.empty(), "no checkpoints written");
  for (const auto& name : names) {
    if (read_text_file(d1 + "/checkpoints/" + name) != read_text_file(d2 + "/checkpoints/" + name)) {
      out.require(false, "checkpoint differs: " + name);
      break;
    }
  }
  out.note(std::to_string(names.size()) + " checkpoints compared");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::map<std::string, std::pair<std::string, std::function<Outcome()>>> criteria{
      {"a1", {"planted-diffusion recovery", criterion_a1}},
      {"a2", {"architecture ordering sanity", criterion_a2}},
      {"a3", {"meta-path projection oracle", criterion_a3}},
      {"a4", {"gradient fidelity", criterion_a4}},
      {"a5", {"lstm cell hand oracle", criterion_a5}},
      {"a6", {"metric oracles", criterion_a6}},
      {"a7", {"cascade pipeline", criterion_a7}},
      {"a8", {"deterministic reruns", criterion_a8}},
  };

  std::vector<std::string> to_run;
  std::string arg = argc > 1 ? argv[1] : "all";
  if (arg == "all") {
    for (const auto& [k, v] : criteria) to_run.push_back(k);
  } else if (criteria.count(arg)) {
    to_run.push_back(arg);
  } else {
    std::fprintf(stderr, "unknown criterion '%s'\n", arg.c_str());
    return 2;
  }

  bool all_pass = true;
  for (const auto& key : to_run) {
    const auto& [label, fn] = criteria.at(key);
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::string upper = key;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::printf("[%s] %s %s%s%s\n", out.pass ? "PASS" : "FAIL", upper.c_str(), label.c_str(),
                out.detail.empty() ? "" : ": ", out.detail.c_str());
    std::fflush(stdout);
    all_pass &= out.pass;
  }
  return all_pass ? 0 : 1;
}
