#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fairbios/harness.hpp"

using namespace fairbios;

namespace {

SynthConfig small_synth(uint64_t seed) {
  SynthConfig cfg;
  cfg.n = 1500;
  cfg.num_professions = 3;
  cfg.seed = seed;
  return cfg;
}

ExperimentConfig small_experiment(uint64_t seed) {
  ExperimentConfig cfg;
  cfg.synth = small_synth(seed);
  cfg.seed = seed;
  cfg.train.max_epochs = 2;
  cfg.featurizer.dim = 1u << 14;
  return cfg;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("full grid runs in fixed row order") {
  ExperimentConfig cfg = small_experiment(1);
  ResultsTable table = run_experiments(cfg);
  REQUIRE(table.rows.size() == 8);
  const char* expected[8][2] = {
      {"gender", "baseline"},        {"gender", "oversampling"},
      {"gender", "loss_weighting"},  {"gender", "postproc_eo"},
      {"profession", "baseline"},    {"profession", "oversampling"},
      {"profession", "loss_weighting"}, {"profession", "postproc_eo"},
  };
  for (size_t i = 0; i < 8; ++i) {
    CHECK(table.rows[i].task == expected[i][0]);
    CHECK(table.rows[i].condition == expected[i][1]);
    CHECK_FALSE(table.rows[i].failed);
  }
  // The gender task records the self-sensitive caveat.
  CHECK(table.rows[0].report.notes.find("sensitive attribute") != std::string::npos);
}

TEST_CASE("single-cell grid") {
  ExperimentConfig cfg = small_experiment(2);
  cfg.tasks = {"gender"};
  cfg.conditions = {"baseline"};
  ResultsTable table = run_experiments(cfg);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].report.accuracy > 0.5);
}

TEST_CASE("same config twice gives byte-identical tables") {
  ExperimentConfig cfg = small_experiment(3);
  std::string a = emit_table(run_experiments(cfg), "csv");
  std::string b = emit_table(run_experiments(cfg), "csv");
  CHECK(a == b);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_experiment(4);
  cfg.tasks = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_experiment(4);
  cfg.conditions = {"nonsense"};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_experiment(4);
  cfg.corpus_path = "also_a_path.csv";  // both sources set
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ExperimentConfig{};  // no source at all
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("experiment config JSON round trip") {
  ExperimentConfig cfg = small_experiment(5);
  cfg.tasks = {"gender"};
  cfg.joint_balance = true;
  cfg.train.learning_rate = 0.05;
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json() == cfg.to_json());
  CHECK(back.tasks == cfg.tasks);
  CHECK(back.train.learning_rate == doctest::Approx(0.05));
  CHECK(back.synth->n == cfg.synth->n);
  CHECK_THROWS_AS(ExperimentConfig::from_json("nonsense"), Error);
}

TEST_CASE("table formats: markdown header, failed-cell placeholder, json round trip") {
  ResultsTable table;
  ResultsTable::Row ok;
  ok.task = "gender";
  ok.condition = "baseline";
  ok.report.condition = "baseline";
  ok.report.task = "gender";
  ok.report.accuracy = 0.9515;
  ok.report.macro_f1 = 0.94;
  ok.report.dpd = 0.5;
  ok.report.eod = 0.25;
  ok.report.n = 100;
  table.rows.push_back(ok);
  ResultsTable::Row bad;
  bad.task = "profession";
  bad.condition = "postproc_eo";
  bad.failed = true;
  bad.error = "cell profession/postproc_eo: something broke";
  table.rows.push_back(bad);

  std::string md = emit_table(table, "markdown");
  CHECK(md.rfind("| Method | Feature | Group | Accuracy | Macro-F1 | DPD | EOD |", 0) == 0);
  CHECK(md.find("| Baseline | gender | gender | 0.952 | 0.940 | 0.500 | 0.250 |") !=
        std::string::npos);
  CHECK(md.find("\xE2\x80\x94") != std::string::npos);

  std::string csv = emit_table(table, "csv");
  CHECK(csv.rfind("method,feature,group,accuracy,macro_f1,dpd,eod\n", 0) == 0);
  CHECK(csv.find("Baseline,gender,gender,0.952,0.940,0.500,0.250") != std::string::npos);

  std::string json = emit_table(table, "json");
  ResultsTable back = table_from_json(json);
  CHECK(emit_table(back, "json") == json);
  CHECK(back.rows[1].failed);

  CHECK_THROWS_AS(emit_table(table, "xml"), Error);
  CHECK_THROWS_AS(emit_table(ResultsTable{}, "csv"), Error);
}

TEST_CASE("distribution report files and percentage sums") {
  TempDir dir("fb_dist_report");
  SynthConfig scfg;
  scfg.n = 2000;
  scfg.seed = 11;
  SynthCorpus corpus = generate(scfg);
  auto maps = build_label_maps(corpus.records);
  auto records = encode_records(corpus.records, maps.first, maps.second);
  SplitSet splits = split_dataset(records, {0.8, 0.1, 0.1}, 7);

  std::string text =
      emit_distribution_report(splits, maps.first, maps.second, dir.path.string());
  CHECK(text.find("train") != std::string::npos);
  for (const char* name :
       {"gender_distribution.csv", "profession_distribution.csv", "distribution.txt",
        "plot_gender_train.txt", "plot_profession_test.txt"})
    CHECK(std::filesystem::exists(dir.path / name));

  // Percentages in the gender CSV sum to 100 per split.
  std::istringstream in(slurp(dir.path / "gender_distribution.csv"));
  std::string line;
  std::getline(in, line);  // header
  std::map<std::string, double> sums;
  while (std::getline(in, line)) {
    size_t c1 = line.find(',');
    size_t c3 = line.rfind(',');
    sums[line.substr(0, c1)] += std::stod(line.substr(c3 + 1));
  }
  REQUIRE(sums.size() == 3);
  for (const auto& [split, sum] : sums) CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("run_all_to_dir writes result tables") {
  TempDir dir("fb_run_all");
  ExperimentConfig cfg = small_experiment(6);
  cfg.tasks = {"gender"};
  cfg.conditions = {"baseline", "postproc_eo"};
  cfg.out_dir = dir.path.string();
  ResultsTable table = run_all_to_dir(cfg);
  CHECK(table.rows.size() == 2);
  for (const char* name : {"results.csv", "results.json", "results.md", "distribution.txt"})
    CHECK(std::filesystem::exists(dir.path / name));
  CHECK(slurp(dir.path / "results.csv") == emit_table(table, "csv"));
}

TEST_CASE("audit: hard labels match the metric suite") {
  TempDir dir("fb_audit");
  std::ofstream out(dir.path / "scores.csv");
  out << "y_true,group,y_pred\n";
  std::vector<int> y_true, y_pred, group;
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    int y = static_cast<int>(rng.next_below(2));
    int g = static_cast<int>(rng.next_below(2));
    int p = rng.next_double() < 0.8 ? y : 1 - y;
    y_true.push_back(y);
    y_pred.push_back(p);
    group.push_back(g);
    out << y << ',' << g << ',' << p << '\n';
  }
  out.close();
  FairnessReport report = audit_scores((dir.path / "scores.csv").string());
  FairnessReport direct = evaluate_predictions("audit", "external", y_true, y_pred, group, 2);
  CHECK(report.accuracy == doctest::Approx(direct.accuracy).epsilon(1e-12));
  CHECK(report.dpd == doctest::Approx(direct.dpd).epsilon(1e-12));
  CHECK(report.eod == doctest::Approx(direct.eod).epsilon(1e-12));
}

TEST_CASE("audit: non-probabilistic scores are rejected") {
  TempDir dir("fb_audit_bad");
  std::ofstream out(dir.path / "scores.csv");
  out << "y_true,group,score_0,score_1\n0,0,0.5,0.4\n1,1,0.5,0.5\n";
  out.close();
  CHECK_THROWS_WITH_AS(audit_scores((dir.path / "scores.csv").string()),
                       doctest::Contains("NonProbabilisticScores"), Error);
}

TEST_CASE("audit: split markers trigger dev-fitted post-processing") {
  TempDir dir("fb_audit_split");
  std::ofstream out(dir.path / "scores.csv");
  out << "y_true,group,score_0,score_1,split\n";
  Rng rng(22);
  for (int i = 0; i < 800; ++i) {
    int y = static_cast<int>(rng.next_below(2));
    int g = static_cast<int>(rng.next_below(2));
    double noise = g == 0 ? 0.15 : 0.35;
    double s1 = std::clamp((y ? 0.7 : 0.3) + (rng.next_double() - 0.5) * 2 * noise, 0.0, 1.0);
    out << y << ',' << g << ',' << (1.0 - s1) << ',' << s1 << ','
        << (i % 2 == 0 ? "dev" : "test") << '\n';
  }
  out.close();
  FairnessReport report = audit_scores((dir.path / "scores.csv").string());
  CHECK(report.n == 400);  // test rows only
  CHECK(report.notes.find("dev rows") != std::string::npos);
  CHECK(report.eod <= 0.15);
}

TEST_CASE("audit: schema problems") {
  TempDir dir("fb_audit_schema");
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir.path / name);
    out << body;
  };
  write("missing.csv", "y_true,score_0,score_1\n0,0.5,0.5\n");
  CHECK_THROWS_WITH_AS(audit_scores((dir.path / "missing.csv").string()),
                       doctest::Contains("SchemaMismatch"), Error);
  write("neither.csv", "y_true,group\n0,0\n");
  CHECK_THROWS_WITH_AS(audit_scores((dir.path / "neither.csv").string()),
                       doctest::Contains("SchemaMismatch"), Error);
  write("gap.csv", "y_true,group,score_0,score_2\n0,0,0.5,0.5\n");
  CHECK_THROWS_WITH_AS(audit_scores((dir.path / "gap.csv").string()),
                       doctest::Contains("SchemaMismatch"), Error);
  write("badsplit.csv", "y_true,group,score_0,score_1,split\n0,0,0.5,0.5,validation\n");
  CHECK_THROWS_WITH_AS(audit_scores((dir.path / "badsplit.csv").string()),
                       doctest::Contains("SchemaMismatch"), Error);
}

TEST_CASE("joint balance oversampling still runs the grid") {
  ExperimentConfig cfg = small_experiment(7);
  cfg.tasks = {"profession"};
  cfg.conditions = {"oversampling"};
  cfg.joint_balance = true;
  ResultsTable table = run_experiments(cfg);
  REQUIRE(table.rows.size() == 1);
  CHECK_FALSE(table.rows[0].failed);
}
