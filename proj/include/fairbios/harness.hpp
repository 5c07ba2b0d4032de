#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fairbios/classifier.hpp"
#include "fairbios/corpus.hpp"
#include "fairbios/fairmetrics.hpp"
#include "fairbios/featurize.hpp"
#include "fairbios/mitigate.hpp"
#include "fairbios/synthdata.hpp"

namespace fairbios {

inline const std::vector<std::string> kAllTasks = {"gender", "profession"};
inline const std::vector<std::string> kAllConditions = {"baseline", "oversampling",
                                                        "loss_weighting", "postproc_eo"};

struct ExperimentConfig {
  std::string corpus_path;           // exactly one of corpus_path / synth
  std::optional<SynthConfig> synth;
  std::vector<std::string> tasks = kAllTasks;
  std::vector<std::string> conditions = kAllConditions;
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  uint64_t seed = 0;
  TrainConfig train;
  FeaturizerConfig featurizer;
  std::string out_dir;
  // Extension beyond the described methodology: oversampling balances the
  // joint (gender, profession) cells instead of the task label alone.
  bool joint_balance = false;

  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& json);
};

struct ResultsTable {
  struct Row {
    std::string task;
    std::string condition;
    bool failed = false;
    std::string error;
    FairnessReport report;
  };
  std::vector<Row> rows;
};

// Runs every (task, condition) cell in fixed order: tasks in the order
// gender, profession; conditions in the order baseline, oversampling,
// loss_weighting, postproc_eo. All cells share one split (so baseline and
// loss_weighting see identical membership and oversampling only alters the
// train multiset); each cell's stochastic steps are seeded from
// derive_seed(cfg.seed, task + "/" + condition). A failed cell is recorded
// with its error and the remaining cells still run.
ResultsTable run_experiments(const ExperimentConfig& cfg);

// format: "csv", "json" or "markdown". Reals use 3 decimals; failed cells
// render an em-dash placeholder. The JSON form round-trips through
// table_from_json.
std::string emit_table(const ResultsTable& table, const std::string& format);
ResultsTable table_from_json(const std::string& json);

// Writes the per-split gender percentage and profession count tables plus
// plain-text x/y plot-data files into out_dir. Returns the stats text.
std::string emit_distribution_report(const SplitSet& splits, const LabelMap& gender_map,
                                     const LabelMap& profession_map, const std::string& out_dir);

// Full pipeline behind the run-all subcommand: runs the grid, then writes
// results.csv / results.json / results.md and the distribution report into
// cfg.out_dir (all atomically). Returns the table.
ResultsTable run_all_to_dir(const ExperimentConfig& cfg);

// Externally produced predictions or scores. CSV columns: y_true, group, and
// either y_pred (hard labels) or score_0..score_{K-1} (rows must sum to
// 1 +- 1e-6); an optional split column carries dev/test markers.
struct ScoreFile {
  std::vector<int> y_true;
  std::vector<int> group;
  std::vector<int> y_pred;                  // empty unless the column exists
  std::vector<std::vector<double>> scores;  // empty unless score columns exist
  std::vector<int> split_marker;            // 0 = dev, 1 = test; empty if absent
  int num_classes = 0;
};

ScoreFile load_score_file(const std::string& path);

// Audits a score file. With both scores and split markers the audit fits an
// equalized-odds policy on the dev rows and reports post-processed metrics on
// the test rows; otherwise metrics cover all rows as-is.
FairnessReport audit_scores(const std::string& path);

}  // namespace fairbios
