#include "fairbios/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fairbios {

namespace {

const std::map<std::string, std::string> kMethodNames = {
    {"baseline", "Baseline"},
    {"oversampling", "Oversampling"},
    {"loss_weighting", "Loss weighting"},
    {"postproc_eo", "Post-proc EO"},
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

struct PreparedData {
  LabelMap gender_map;
  LabelMap profession_map;
  SplitSet splits;
};

PreparedData prepare(const ExperimentConfig& cfg) {
  std::vector<RawRecord> raw;
  if (cfg.synth) {
    raw = generate(*cfg.synth).records;
  } else {
    raw = load_corpus(cfg.corpus_path);
  }
  PreparedData out;
  auto maps = build_label_maps(raw);
  out.gender_map = std::move(maps.first);
  out.profession_map = std::move(maps.second);
  std::vector<Record> records = encode_records(raw, out.gender_map, out.profession_map);
  out.splits = split_dataset(records, cfg.split_ratios, derive_seed(cfg.seed, "split"));
  return out;
}

// Joint (gender, profession) oversampling: every non-empty cell is topped up
// to the largest cell count.
std::vector<Record> oversample_joint(const std::vector<Record>& train, int num_professions,
                                     uint64_t seed) {
  std::map<int, std::vector<size_t>> cells;
  for (size_t i = 0; i < train.size(); ++i)
    cells[train[i].gender_id * num_professions + train[i].profession_id].push_back(i);
  size_t largest = 0;
  for (const auto& [key, members] : cells) largest = std::max(largest, members.size());
  std::vector<Record> out = train;
  Rng rng(derive_seed(seed, "oversample_joint"));
  for (const auto& [key, members] : cells)
    for (size_t k = members.size(); k < largest; ++k)
      out.push_back(train[members[rng.next_below(members.size())]]);
  return out;
}

std::vector<std::string> texts_of(const std::vector<Record>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(r.text);
  return out;
}

std::vector<int> labels_of(const std::vector<Record>& records, bool gender_task) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(gender_task ? r.gender_id : r.profession_id);
  return out;
}

std::vector<int> genders_of(const std::vector<Record>& records) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(r.gender_id);
  return out;
}

FairnessReport run_cell(const ExperimentConfig& cfg, const PreparedData& data,
                        const std::string& task, const std::string& condition) {
  bool gender_task = task == "gender";
  int num_classes = gender_task ? data.gender_map.size() : data.profession_map.size();
  uint64_t cell_seed = derive_seed(cfg.seed, task + "/" + condition);

  std::vector<Record> train_records = data.splits.train;
  if (condition == "oversampling") {
    if (cfg.joint_balance) {
      train_records = oversample_joint(train_records, data.profession_map.size(), cell_seed);
    } else {
      train_records = oversample(train_records,
                                 gender_task ? TargetLabel::Gender : TargetLabel::Profession,
                                 num_classes, cell_seed);
    }
  }

  std::vector<int> train_y = labels_of(train_records, gender_task);
  std::vector<int> dev_y = labels_of(data.splits.dev, gender_task);
  std::vector<int> test_y = labels_of(data.splits.test, gender_task);

  std::vector<FeatureVector> train_x = featurize_batch(texts_of(train_records), cfg.featurizer);
  std::vector<FeatureVector> dev_x = featurize_batch(texts_of(data.splits.dev), cfg.featurizer);
  std::vector<FeatureVector> test_x = featurize_batch(texts_of(data.splits.test), cfg.featurizer);

  std::vector<double> class_weights;
  if (condition == "loss_weighting") class_weights = compute_class_weights(train_y, num_classes);

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cell_seed, "train");
  LinearModel model = train(train_x, train_y, dev_x, dev_y, class_weights, num_classes, tc).first;

  std::vector<int> test_pred(test_x.size());
  std::vector<std::string> notes;
  if (gender_task) notes.push_back("sensitive attribute equals the prediction target");

  if (condition == "postproc_eo") {
    std::vector<int> dev_gender = genders_of(data.splits.dev);
    std::vector<int> test_gender = genders_of(data.splits.test);
    uint64_t apply_seed = derive_seed(cell_seed, "apply");
    if (num_classes == 2) {
      GroupedScores gs;
      gs.y_true = dev_y;
      gs.group = dev_gender;
      gs.scores.reserve(dev_x.size());
      for (const auto& x : dev_x) gs.scores.push_back(predict_scores(model, x)[1]);
      EOPolicy policy = fit_eo_policy(gs);
      std::vector<double> test_scores;
      test_scores.reserve(test_x.size());
      for (const auto& x : test_x) test_scores.push_back(predict_scores(model, x)[1]);
      test_pred = apply_eo_policy(policy, test_scores, test_gender, apply_seed);
      if (policy.label_equals_group)
        notes.push_back("equalized-odds fit degenerated to rate capping (group equals label)");
    } else {
      std::vector<std::vector<double>> dev_scores, test_scores;
      dev_scores.reserve(dev_x.size());
      test_scores.reserve(test_x.size());
      for (const auto& x : dev_x) dev_scores.push_back(predict_scores(model, x));
      for (const auto& x : test_x) test_scores.push_back(predict_scores(model, x));
      MulticlassEOPolicy policy =
          fit_eo_policy_multiclass(dev_scores, dev_y, dev_gender, 101);
      size_t pass_through = 0;
      for (const EOPolicy& p : policy.per_class)
        if (p.pass_through) ++pass_through;
      if (pass_through > 0)
        notes.push_back(std::to_string(pass_through) + " class cells fell back to pass-through");
      test_pred = apply_eo_policy_multiclass(policy, test_scores, test_gender, apply_seed);
    }
  } else {
    for (size_t i = 0; i < test_x.size(); ++i) test_pred[i] = predict_label(model, test_x[i]);
  }

  FairnessReport report = evaluate_predictions(condition, task, test_y, test_pred,
                                               genders_of(data.splits.test), num_classes);
  std::string joined;
  for (const std::string& n : notes) {
    if (!joined.empty()) joined += "; ";
    joined += n;
  }
  report.notes = joined;
  return report;
}

ResultsTable run_on_prepared(const ExperimentConfig& cfg, const PreparedData& data) {
  ResultsTable table;
  for (const std::string& task : kAllTasks) {
    if (!contains(cfg.tasks, task)) continue;
    for (const std::string& condition : kAllConditions) {
      if (!contains(cfg.conditions, condition)) continue;
      ResultsTable::Row row;
      row.task = task;
      row.condition = condition;
      try {
        row.report = run_cell(cfg, data, task, condition);
      } catch (const Error& e) {
        row.failed = true;
        row.error = "cell " + task + "/" + condition + ": " + e.what();
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

double round3(double v) { return std::stod(format_fixed(v, 3)); }

}  // namespace

void ExperimentConfig::validate() const {
  if (tasks.empty()) throw_usage("BadConfig", "at least one task required");
  if (conditions.empty()) throw_usage("BadConfig", "at least one condition required");
  for (const std::string& t : tasks)
    if (!contains(kAllTasks, t)) throw_usage("BadConfig", "unknown task '" + t + "'");
  for (const std::string& c : conditions)
    if (!contains(kAllConditions, c)) throw_usage("BadConfig", "unknown condition '" + c + "'");
  if (corpus_path.empty() == !synth.has_value())
    throw_usage("BadConfig", "exactly one of corpus path and synth config required");
  if (synth) synth->validate();
  train.validate();
  featurizer.validate();
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  if (!corpus_path.empty()) j["data"] = corpus_path;
  if (synth) j["synth"] = nlohmann::json::parse(synth->to_json());
  j["tasks"] = tasks;
  j["conditions"] = conditions;
  j["split_ratios"] = split_ratios;
  j["seed"] = seed;
  if (!out_dir.empty()) j["out_dir"] = out_dir;
  j["joint_balance"] = joint_balance;
  j["train"] = {{"learning_rate", train.learning_rate},
                {"batch_size", train.batch_size},
                {"max_epochs", train.max_epochs},
                {"warmup_fraction", train.warmup_fraction},
                {"early_stop_patience", train.early_stop_patience},
                {"l2_penalty", train.l2_penalty}};
  j["featurizer"] = {{"dim", featurizer.dim},
                     {"ngram_max", featurizer.ngram_max},
                     {"normalize", featurizer.normalize},
                     {"hash_seed", featurizer.hash_seed}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw_usage("BadConfig", "cannot parse experiment config");
  ExperimentConfig cfg;
  try {
    cfg.corpus_path = j.value("data", "");
    if (j.contains("synth")) cfg.synth = SynthConfig::from_json(j.at("synth").dump());
    if (j.contains("tasks")) cfg.tasks = j.at("tasks").get<std::vector<std::string>>();
    if (j.contains("conditions"))
      cfg.conditions = j.at("conditions").get<std::vector<std::string>>();
    if (j.contains("split_ratios"))
      cfg.split_ratios = j.at("split_ratios").get<std::array<double, 3>>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out_dir", "");
    cfg.joint_balance = j.value("joint_balance", false);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
      cfg.train.max_epochs = t.value("max_epochs", cfg.train.max_epochs);
      cfg.train.warmup_fraction = t.value("warmup_fraction", cfg.train.warmup_fraction);
      cfg.train.early_stop_patience =
          t.value("early_stop_patience", cfg.train.early_stop_patience);
      cfg.train.l2_penalty = t.value("l2_penalty", cfg.train.l2_penalty);
    }
    if (j.contains("featurizer")) {
      const auto& f = j.at("featurizer");
      cfg.featurizer.dim = f.value("dim", cfg.featurizer.dim);
      cfg.featurizer.ngram_max = f.value("ngram_max", cfg.featurizer.ngram_max);
      cfg.featurizer.normalize = f.value("normalize", cfg.featurizer.normalize);
      cfg.featurizer.hash_seed = f.value("hash_seed", cfg.featurizer.hash_seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw_usage("BadConfig", e.what());
  }
  return cfg;
}

ResultsTable run_experiments(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_on_prepared(cfg, prepare(cfg));
}

std::string emit_table(const ResultsTable& table, const std::string& format) {
  if (table.rows.empty()) throw_usage("EmptyTable", "nothing to emit");
  const char* dash = "\xE2\x80\x94";  // placeholder for failed cells

  if (format == "csv" || format == "markdown") {
    std::ostringstream ss;
    bool md = format == "markdown";
    if (md) {
      ss << "| Method | Feature | Group | Accuracy | Macro-F1 | DPD | EOD |\n";
      ss << "|---|---|---|---|---|---|---|\n";
    } else {
      ss << "method,feature,group,accuracy,macro_f1,dpd,eod\n";
    }
    for (const auto& row : table.rows) {
      std::vector<std::string> cells;
      cells.push_back(kMethodNames.at(row.condition));
      cells.push_back(row.task);
      cells.push_back("gender");
      if (row.failed) {
        for (int i = 0; i < 4; ++i) cells.push_back(dash);
      } else {
        cells.push_back(format_fixed(row.report.accuracy, 3));
        cells.push_back(format_fixed(row.report.macro_f1, 3));
        cells.push_back(format_fixed(row.report.dpd, 3));
        cells.push_back(format_fixed(row.report.eod, 3));
      }
      for (size_t i = 0; i < cells.size(); ++i) {
        if (md) ss << "| " << cells[i] << ' ';
        else ss << (i ? "," : "") << cells[i];
      }
      ss << (md ? "|\n" : "\n");
    }
    return ss.str();
  }

  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json j;
      j["method"] = kMethodNames.at(row.condition);
      j["task"] = row.task;
      j["condition"] = row.condition;
      j["group"] = "gender";
      j["failed"] = row.failed;
      if (row.failed) {
        j["error"] = row.error;
      } else {
        j["accuracy"] = round3(row.report.accuracy);
        j["macro_f1"] = round3(row.report.macro_f1);
        j["dpd"] = round3(row.report.dpd);
        j["eod"] = round3(row.report.eod);
        j["dpd_mean"] = round3(row.report.dpd_mean);
        j["eod_mean"] = round3(row.report.eod_mean);
        j["n"] = row.report.n;
        j["zero_denominator_flag"] = row.report.zero_denominator_flag;
        if (!row.report.notes.empty()) j["notes"] = row.report.notes;
      }
      rows.push_back(std::move(j));
    }
    return rows.dump(2);
  }

  throw_usage("BadFormat", "unknown table format '" + format + "'");
}

ResultsTable table_from_json(const std::string& json) {
  nlohmann::json rows = nlohmann::json::parse(json, nullptr, false);
  if (rows.is_discarded() || !rows.is_array())
    throw_data("BadTableJson", "cannot parse results table");
  ResultsTable table;
  try {
    for (const auto& j : rows) {
      ResultsTable::Row row;
      row.task = j.at("task").get<std::string>();
      row.condition = j.at("condition").get<std::string>();
      row.failed = j.at("failed").get<bool>();
      if (row.failed) {
        row.error = j.value("error", "");
      } else {
        row.report.condition = row.condition;
        row.report.task = row.task;
        row.report.accuracy = j.at("accuracy").get<double>();
        row.report.macro_f1 = j.at("macro_f1").get<double>();
        row.report.dpd = j.at("dpd").get<double>();
        row.report.eod = j.at("eod").get<double>();
        row.report.dpd_mean = j.value("dpd_mean", 0.0);
        row.report.eod_mean = j.value("eod_mean", 0.0);
        row.report.n = j.value("n", size_t{0});
        row.report.zero_denominator_flag = j.value("zero_denominator_flag", false);
        row.report.notes = j.value("notes", "");
      }
      table.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw_data("BadTableJson", e.what());
  }
  return table;
}

std::string emit_distribution_report(const SplitSet& splits, const LabelMap& gender_map,
                                     const LabelMap& profession_map, const std::string& out_dir) {
  DistributionStats stats =
      compute_distribution_stats(splits, gender_map.size(), profession_map.size());
  const char* split_names[3] = {"train", "dev", "test"};

  std::ostringstream gender_csv, prof_csv, text;
  gender_csv << "split,gender,count,percent\n";
  prof_csv << "split,profession,count\n";
  for (int p = 0; p < 3; ++p) {
    const SplitDistribution& d = stats.splits[static_cast<size_t>(p)];
    std::ostringstream gender_plot, prof_plot;
    text << split_names[p] << " (" << d.total << " records)\n";
    for (int g = 0; g < gender_map.size(); ++g) {
      size_t gi = static_cast<size_t>(g);
      gender_csv << split_names[p] << ',' << gender_map.name_of(g) << ',' << d.gender_counts[gi]
                 << ',' << format_fixed(d.gender_percent[gi], 3) << '\n';
      gender_plot << g << ' ' << format_fixed(d.gender_percent[gi], 3) << '\n';
      text << "  " << gender_map.name_of(g) << ": " << format_fixed(d.gender_percent[gi], 3)
           << "%\n";
    }
    for (int c = 0; c < profession_map.size(); ++c) {
      size_t ci = static_cast<size_t>(c);
      prof_csv << split_names[p] << ',' << profession_map.name_of(c) << ','
               << d.profession_counts[ci] << '\n';
      prof_plot << c << ' ' << d.profession_counts[ci] << '\n';
    }
    atomic_write_file(out_dir + "/plot_gender_" + split_names[p] + ".txt", gender_plot.str());
    atomic_write_file(out_dir + "/plot_profession_" + split_names[p] + ".txt", prof_plot.str());
  }
  atomic_write_file(out_dir + "/gender_distribution.csv", gender_csv.str());
  atomic_write_file(out_dir + "/profession_distribution.csv", prof_csv.str());
  atomic_write_file(out_dir + "/distribution.txt", text.str());
  return text.str();
}

ResultsTable run_all_to_dir(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.out_dir.empty()) throw_usage("BadConfig", "out_dir required");
  PreparedData data = prepare(cfg);
  ResultsTable table = run_on_prepared(cfg, data);
  atomic_write_file(cfg.out_dir + "/results.csv", emit_table(table, "csv"));
  atomic_write_file(cfg.out_dir + "/results.json", emit_table(table, "json"));
  atomic_write_file(cfg.out_dir + "/results.md", emit_table(table, "markdown"));
  emit_distribution_report(data.splits, data.gender_map, data.profession_map, cfg.out_dir);
  return table;
}

// ---------------------------------------------------------------------------
// external score auditing

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string lower_strip(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

ScoreFile load_score_file(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw_data("SchemaMismatch", path + ": empty file");

  std::vector<std::string> header = split_csv_line(line);
  int y_true_col = -1, group_col = -1, y_pred_col = -1, split_col = -1;
  std::map<int, int> score_cols;  // class -> column
  for (size_t i = 0; i < header.size(); ++i) {
    std::string name = lower_strip(header[i]);
    if (name == "y_true") y_true_col = static_cast<int>(i);
    else if (name == "group") group_col = static_cast<int>(i);
    else if (name == "y_pred") y_pred_col = static_cast<int>(i);
    else if (name == "split") split_col = static_cast<int>(i);
    else if (name.rfind("score_", 0) == 0) {
      try {
        score_cols[std::stoi(name.substr(6))] = static_cast<int>(i);
      } catch (const std::exception&) {
        throw_data("SchemaMismatch", path + ": bad score column '" + name + "'");
      }
    }
  }
  if (y_true_col < 0 || group_col < 0)
    throw_data("SchemaMismatch", path + ": y_true and group columns required");
  int num_score_classes = static_cast<int>(score_cols.size());
  for (int c = 0; c < num_score_classes; ++c)
    if (!score_cols.count(c))
      throw_data("SchemaMismatch", path + ": score columns must be score_0..score_{K-1}");
  if (num_score_classes == 0 && y_pred_col < 0)
    throw_data("SchemaMismatch", path + ": need either y_pred or score_0..score_{K-1}");

  std::vector<int> y_true, group, y_pred, split_marker;  // marker: 0 dev, 1 test
  std::vector<std::vector<double>> scores;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    auto field = [&](int col) -> const std::string& {
      if (col < 0 || static_cast<size_t>(col) >= fields.size())
        throw_data("SchemaMismatch", path + ": line " + std::to_string(line_no) + " truncated");
      return fields[static_cast<size_t>(col)];
    };
    try {
      y_true.push_back(std::stoi(field(y_true_col)));
      group.push_back(std::stoi(field(group_col)));
      if (y_pred_col >= 0) y_pred.push_back(std::stoi(field(y_pred_col)));
      if (num_score_classes > 0) {
        std::vector<double> row(static_cast<size_t>(num_score_classes));
        double sum = 0.0;
        for (int c = 0; c < num_score_classes; ++c) {
          row[static_cast<size_t>(c)] = std::stod(field(score_cols.at(c)));
          sum += row[static_cast<size_t>(c)];
        }
        if (std::abs(sum - 1.0) > 1e-6)
          throw_data("NonProbabilisticScores",
                     path + ": line " + std::to_string(line_no) + " scores sum to " +
                         format_fixed(sum, 6));
        scores.push_back(std::move(row));
      }
      if (split_col >= 0) {
        std::string m = lower_strip(field(split_col));
        if (m == "dev") split_marker.push_back(0);
        else if (m == "test") split_marker.push_back(1);
        else
          throw_data("SchemaMismatch",
                     path + ": line " + std::to_string(line_no) + " split must be dev or test");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw_data("SchemaMismatch", path + ": line " + std::to_string(line_no) + " not numeric");
    }
  }
  if (y_true.empty()) throw_data("SchemaMismatch", path + ": no data rows");

  ScoreFile out;
  out.y_true = std::move(y_true);
  out.group = std::move(group);
  out.y_pred = std::move(y_pred);
  out.scores = std::move(scores);
  out.split_marker = split_col >= 0 ? std::move(split_marker) : std::vector<int>{};
  out.num_classes = num_score_classes;
  if (out.num_classes == 0) {
    for (size_t i = 0; i < out.y_true.size(); ++i)
      out.num_classes = std::max({out.num_classes, out.y_true[i] + 1, out.y_pred[i] + 1});
  }
  return out;
}

FairnessReport audit_scores(const std::string& path) {
  ScoreFile file = load_score_file(path);
  const auto& y_true = file.y_true;
  const auto& group = file.group;
  const auto& scores = file.scores;
  const auto& split_marker = file.split_marker;
  int num_classes = file.num_classes;

  if (!split_marker.empty() && !scores.empty()) {
    // Fit equalized odds on the dev rows, report post-processed test rows.
    std::vector<size_t> dev_idx, test_idx;
    for (size_t i = 0; i < split_marker.size(); ++i)
      (split_marker[i] == 0 ? dev_idx : test_idx).push_back(i);
    if (dev_idx.empty() || test_idx.empty())
      throw_data("SchemaMismatch", path + ": both dev and test rows required");
    uint64_t apply_seed = derive_seed(0, "audit");
    std::vector<int> test_y, test_group, test_pred;
    for (size_t i : test_idx) {
      test_y.push_back(y_true[i]);
      test_group.push_back(group[i]);
    }
    if (num_classes == 2) {
      GroupedScores gs;
      for (size_t i : dev_idx) {
        gs.scores.push_back(scores[i][1]);
        gs.y_true.push_back(y_true[i]);
        gs.group.push_back(group[i]);
      }
      EOPolicy policy = fit_eo_policy(gs);
      std::vector<double> test_scores;
      for (size_t i : test_idx) test_scores.push_back(scores[i][1]);
      test_pred = apply_eo_policy(policy, test_scores, test_group, apply_seed);
    } else {
      std::vector<std::vector<double>> dev_s, test_s;
      std::vector<int> dev_y, dev_group;
      for (size_t i : dev_idx) {
        dev_s.push_back(scores[i]);
        dev_y.push_back(y_true[i]);
        dev_group.push_back(group[i]);
      }
      for (size_t i : test_idx) test_s.push_back(scores[i]);
      MulticlassEOPolicy policy = fit_eo_policy_multiclass(dev_s, dev_y, dev_group, 101);
      test_pred = apply_eo_policy_multiclass(policy, test_s, test_group, apply_seed);
    }
    FairnessReport report =
        evaluate_predictions("audit_postproc_eo", "external", test_y, test_pred, test_group,
                             num_classes);
    report.notes = "equalized odds fitted on dev rows, metrics on test rows";
    return report;
  }

  std::vector<int> pred;
  if (!file.y_pred.empty()) {
    pred = file.y_pred;
  } else {
    pred.reserve(scores.size());
    for (const auto& row : scores) {
      int best = 0;
      for (int c = 1; c < num_classes; ++c)
        if (row[static_cast<size_t>(c)] > row[static_cast<size_t>(best)]) best = c;
      pred.push_back(best);
    }
  }
  return evaluate_predictions("audit", "external", y_true, pred, group, num_classes);
}

}  // namespace fairbios
