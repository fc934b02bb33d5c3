#include <catch2/catch.hpp>

#include <set>

#include "hdd/experiment.hpp"
#include "test_util.hpp"

using namespace hdd;

namespace {

std::string small_synth_config(const std::string& outdir) {
  return "task = diffusion\n"
         "topic = routing\n"
         "seed = 9\n"
         "synth.authors = 30\n"
         "synth.start_year = 2000\n"
         "synth.end_year = 2005\n"
         "synth.papers_per_year = 20\n"
         "synth.authors_min = 2\n"
         "synth.authors_max = 3\n"
         "synth.venues = 3\n"
         "synth.seed_fraction = 0.15\n"
         "synth.threshold = 1\n"
         "synth.seed = 5\n"
         "metapaths = APA\n"
         "years.from = 2003\n"
         "years.to = 2004\n"
         "window.len = 2\n"
         "anchors.cap = 16\n"
         "models = mlp\n"
         "model.mlp.hidden_dim = 8\n"
         "model.mlp.dropout = 0\n"
         "train.epochs = 4\n"
         "train.batch = 16\n"
         "output.dir = " +
         outdir + "\n";
}

}  // namespace

TEST_CASE("config parsing accepts the documented keys", "[experiment]") {
  auto cfg = ExperimentConfig::parse_text(small_synth_config("/tmp/x"), "test");
  CHECK(cfg.task == "diffusion");
  CHECK(cfg.topic == "routing");
  CHECK(cfg.use_synth);
  CHECK(cfg.synth.n_authors == 30);
  CHECK(cfg.synth.topic == "routing");
  CHECK(cfg.metapaths == std::vector<std::string>{"APA"});
  CHECK(cfg.models.size() == 1);
  CHECK(cfg.models[0].config.hidden_dim == 8);
  CHECK(cfg.train_hyper.epochs == 4);
  CHECK(cfg.seed == 9);
}

TEST_CASE("config parsing rejects malformed input", "[experiment]") {
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("task = diffusion\nbogus.key = 1\n", "t"),
                    Catch::Contains("unknown config key"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("task diffusion\n", "t"), Catch::Contains("key = value"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text("task = diffusion\ntask = cascade\n", "t"),
                    Catch::Contains("duplicate key"));
  // missing topic
  CHECK_THROWS_AS(ExperimentConfig::parse_text("task = diffusion\nmetapaths = APA\nmodels = mlp\n", "t"),
                  ConfigError);
  CHECK_THROWS_WITH(ExperimentConfig::parse_text(small_synth_config("/tmp/x") + "window.mode = weird\n", "t"),
                    Catch::Contains("window mode"));
  CHECK_THROWS_WITH(ExperimentConfig::parse_text(small_synth_config("/tmp/x") + "train.epochs2 = 1\n", "t"),
                    Catch::Contains("unknown config key"));
}

TEST_CASE("run_experiment writes rows for every trained fold", "[experiment]") {
  TempDir dir;
  auto cfg = ExperimentConfig::parse_text(small_synth_config(dir.file("out")), "test");
  auto result = run_experiment(cfg);

  std::set<int> years;
  std::set<std::string> metrics;
  for (const auto& r : result.rows) {
    years.insert(r.year);
    if (r.model == "mlp") metrics.insert(r.metric);
  }
  for (int t : result.skipped_years) CHECK((t == 2003 || t == 2004));
  CHECK(years.size() + result.skipped_years.size() == 2);
  if (!result.rows.empty())
    CHECK(metrics == std::set<std::string>{"ap", "aupr", "precision", "recall"});

  // the report is sorted and parseable
  auto text = read_text_file(result.report_path);
  CHECK(text.rfind("year\tmodel\tmetric\tvalue\n", 0) == 0);

  // manifest lists the report with its content hash
  auto manifest = read_text_file(result.manifest_path);
  CHECK(manifest.find("report.tsv") != std::string::npos);
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("status\tok") != std::string::npos);
}

TEST_CASE("reruns are byte-identical", "[experiment]") {
  TempDir dir;
  auto cfg1 = ExperimentConfig::parse_text(small_synth_config(dir.file("r1")), "test");
  auto cfg2 = ExperimentConfig::parse_text(small_synth_config(dir.file("r2")), "test");
  auto a = run_experiment(cfg1);
  auto b = run_experiment(cfg2);
  CHECK(read_text_file(a.report_path) == read_text_file(b.report_path));

  // manifests differ only in nothing: same config body except output.dir
  auto strip = [](std::string s, const std::string& needle) {
    size_t at = s.find(needle);
    while (at != std::string::npos) {
      size_t end = s.find('\n', at);
      s.erase(at, end - at + 1);
      at = s.find(needle);
    }
    return s;
  };
  CHECK(strip(read_text_file(a.manifest_path), "config_hash") ==
        strip(read_text_file(b.manifest_path), "config_hash"));
}

TEST_CASE("stage failures persist a partial manifest", "[experiment]") {
  TempDir dir;
  std::string text = small_synth_config(dir.file("out"));
  // point the data at nonexistent files instead of synth
  std::string broken;
  for (const auto& line : split(text, '\n')) {
    if (line.rfind("synth.", 0) == 0) continue;
    if (line.empty()) continue;
    broken += line + "\n";
  }
  broken += "data.nodes = /nonexistent/nodes.tsv\n";
  broken += "data.edges = /nonexistent/edges.tsv\n";
  auto cfg = ExperimentConfig::parse_text(broken, "test");
  CHECK_THROWS_AS(run_experiment(cfg), StageError);
  auto manifest = read_text_file(dir.file("out") + "/manifest.tsv");
  CHECK(manifest.find("status\tfailed") != std::string::npos);
  CHECK(manifest.find("error\tdata") != std::string::npos);
}

TEST_CASE("plot data merges and summarizes reports", "[experiment]") {
  TempDir dir;
  write_text_file(dir.file("r1.tsv"),
                  "year\tmodel\tmetric\tvalue\n"
                  "2003\tmlp\taupr\t0.500000\n"
                  "2004\tmlp\taupr\t0.700000\n");
  write_text_file(dir.file("r2.tsv"),
                  "year\tmodel\tmetric\tvalue\n"
                  "2005\tmlp\taupr\t0.900000\n");

  SECTION("single report is a sorted copy with means") {
    auto p = emit_plot_data({dir.file("r1.tsv")}, "diffusion", "routing");
    CHECK(p.merged ==
          "task\ttopic\tmodel\tyear\tmetric\tvalue\n"
          "diffusion\trouting\tmlp\t2003\taupr\t0.500000\n"
          "diffusion\trouting\tmlp\t2004\taupr\t0.700000\n");
    CHECK(p.summary.find("mlp\taupr\t0.600000\t2") != std::string::npos);
  }
  SECTION("disjoint year ranges concatenate globally sorted") {
    auto p = emit_plot_data({dir.file("r2.tsv"), dir.file("r1.tsv")}, "diffusion", "routing");
    size_t p3 = p.merged.find("2003");
    size_t p5 = p.merged.find("2005");
    REQUIRE(p3 != std::string::npos);
    REQUIRE(p5 != std::string::npos);
    CHECK(p3 < p5);
    CHECK(p.summary.find("mlp\taupr\t0.700000\t3") != std::string::npos);
  }
  SECTION("identical duplicates collapse, conflicting ones fail") {
    CHECK_NOTHROW(emit_plot_data({dir.file("r1.tsv"), dir.file("r1.tsv")}, "diffusion", "routing"));
    write_text_file(dir.file("r3.tsv"),
                    "year\tmodel\tmetric\tvalue\n"
                    "2003\tmlp\taupr\t0.999000\n");
    CHECK_THROWS_WITH(emit_plot_data({dir.file("r1.tsv"), dir.file("r3.tsv")}, "diffusion", "routing"),
                      Catch::Contains("conflicting duplicate"));
  }
}

TEST_CASE("cascade task produces mse and ap rows", "[experiment]") {
  TempDir dir;
  std::string text =
      "task = cascade\n"
      "topic = routing\n"
      "seed = 4\n"
      "synth.authors = 40\n"
      "synth.start_year = 2000\n"
      "synth.end_year = 2006\n"
      "synth.papers_per_year = 30\n"
      "synth.authors_min = 2\n"
      "synth.authors_max = 3\n"
      "synth.venues = 4\n"
      "synth.seed_fraction = 0.2\n"
      "synth.threshold = 1\n"
      "synth.seed = 12\n"
      "metapaths = PCP,PVP\n"
      "years.from = 2004\n"
      "years.to = 2004\n"
      "window.len = 3\n"
      "anchors.cap = 32\n"
      "models = mlp\n"
      "model.mlp.hidden_dim = 8\n"
      "model.mlp.dropout = 0\n"
      "train.epochs = 4\n"
      "output.dir = " +
      dir.file("out") + "\n";
  auto cfg = ExperimentConfig::parse_text(text, "test");
  auto result = run_experiment(cfg);
  std::set<std::string> metrics;
  for (const auto& r : result.rows)
    if (r.model == "mlp") metrics.insert(r.metric);
  if (result.skipped_years.empty()) CHECK(metrics == std::set<std::string>{"ap", "mse"});
}
