#include "fairbios/fairbios.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairbios/harness.hpp"

struct fb_dataset {
  fairbios::LabelMap gender_map;
  fairbios::LabelMap profession_map;
  fairbios::SplitSet splits;
};

struct fb_table {
  fairbios::ResultsTable table;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FB_OK;
  } catch (const fairbios::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FB_ERR_NUMERIC;
  }
}

int usage_error(const std::string& msg) {
  g_last_error = msg;
  return FB_ERR_USAGE;
}

fairbios::ExperimentConfig parse_config(const char* config_json) {
  if (!config_json || !*config_json) return fairbios::ExperimentConfig{};
  return fairbios::ExperimentConfig::from_json(config_json);
}

std::vector<std::string> texts_of(const std::vector<fairbios::Record>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.text);
  return out;
}

std::vector<int> labels_of(const std::vector<fairbios::Record>& records, bool gender_task) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(gender_task ? r.gender_id : r.profession_id);
  return out;
}

}  // namespace

extern "C" {

const char* fb_last_error(void) { return g_last_error.c_str(); }

void fb_string_free(char* s) { std::free(s); }

int fb_synth_generate(const char* config_json, const char* csv_path, const char* sidecar_path) {
  if (!config_json || !csv_path) return usage_error("fb_synth_generate: NULL argument");
  return guarded([&] {
    fairbios::SynthConfig cfg = fairbios::SynthConfig::from_json(config_json);
    fairbios::SynthCorpus corpus = fairbios::generate(cfg);
    fairbios::atomic_write_file(csv_path, fairbios::synth_csv(corpus));
    if (sidecar_path)
      fairbios::atomic_write_file(sidecar_path, fairbios::synth_sidecar_json(cfg, corpus));
  });
}

int fb_dataset_load(const char* path, uint64_t seed, fb_dataset** out) {
  if (!path || !out) return usage_error("fb_dataset_load: NULL argument");
  return guarded([&] {
    std::vector<fairbios::RawRecord> raw = fairbios::load_corpus(path);
    auto maps = fairbios::build_label_maps(raw);
    std::vector<fairbios::Record> records =
        fairbios::encode_records(raw, maps.first, maps.second);
    auto ds = std::make_unique<fb_dataset>();
    ds->gender_map = std::move(maps.first);
    ds->profession_map = std::move(maps.second);
    ds->splits = fairbios::split_dataset(records, {0.8, 0.1, 0.1},
                                         fairbios::derive_seed(seed, "split"));
    *out = ds.release();
  });
}

void fb_dataset_free(fb_dataset* ds) { delete ds; }

int fb_dataset_distribution(const fb_dataset* ds, const char* out_dir, char** text_out) {
  if (!ds || !out_dir) return usage_error("fb_dataset_distribution: NULL argument");
  return guarded([&] {
    std::string text = fairbios::emit_distribution_report(ds->splits, ds->gender_map,
                                                          ds->profession_map, out_dir);
    if (text_out) *text_out = dup_string(text);
  });
}

int fb_train(const fb_dataset* ds, const char* task, const char* condition,
             const char* config_json, const char* model_path, char** report_json_out) {
  if (!ds || !task || !condition || !model_path) return usage_error("fb_train: NULL argument");
  return guarded([&] {
    std::string task_s = task, cond_s = condition;
    if (task_s != "gender" && task_s != "profession")
      fairbios::throw_usage("BadTask", "task must be gender or profession");
    if (cond_s != "baseline" && cond_s != "oversampling" && cond_s != "loss_weighting")
      fairbios::throw_usage("BadCondition",
                            "condition must be baseline, oversampling or loss_weighting");
    fairbios::ExperimentConfig cfg = parse_config(config_json);
    bool gender_task = task_s == "gender";
    int num_classes = gender_task ? ds->gender_map.size() : ds->profession_map.size();
    uint64_t cell_seed = fairbios::derive_seed(cfg.seed, task_s + "/" + cond_s);

    std::vector<fairbios::Record> train_records = ds->splits.train;
    if (cond_s == "oversampling") {
      train_records = fairbios::oversample(
          train_records,
          gender_task ? fairbios::TargetLabel::Gender : fairbios::TargetLabel::Profession,
          num_classes, cell_seed);
    }
    std::vector<int> train_y = labels_of(train_records, gender_task);
    std::vector<int> dev_y = labels_of(ds->splits.dev, gender_task);
    auto train_x = fairbios::featurize_batch(texts_of(train_records), cfg.featurizer);
    auto dev_x = fairbios::featurize_batch(texts_of(ds->splits.dev), cfg.featurizer);
    std::vector<double> class_weights;
    if (cond_s == "loss_weighting")
      class_weights = fairbios::compute_class_weights(train_y, num_classes);

    fairbios::TrainConfig tc = cfg.train;
    tc.seed = fairbios::derive_seed(cell_seed, "train");
    auto [model, report] =
        fairbios::train(train_x, train_y, dev_x, dev_y, class_weights, num_classes, tc);
    fairbios::save_model(model, cfg.featurizer, model_path);

    if (report_json_out) {
      nlohmann::json j;
      j["best_epoch"] = report.best_epoch;
      j["stopped_early"] = report.stopped_early;
      nlohmann::json epochs = nlohmann::json::array();
      for (const auto& e : report.epochs)
        epochs.push_back({{"train_loss", e.train_loss}, {"dev_macro_f1", e.dev_macro_f1}});
      j["epochs"] = epochs;
      *report_json_out = dup_string(j.dump(2));
    }
  });
}

int fb_evaluate(const fb_dataset* ds, const char* task, const char* model_path,
                const char* config_json, char** report_json_out) {
  if (!ds || !task || !model_path || !report_json_out)
    return usage_error("fb_evaluate: NULL argument");
  return guarded([&] {
    std::string task_s = task;
    if (task_s != "gender" && task_s != "profession")
      fairbios::throw_usage("BadTask", "task must be gender or profession");
    fairbios::ExperimentConfig cfg = parse_config(config_json);
    bool gender_task = task_s == "gender";
    int num_classes = gender_task ? ds->gender_map.size() : ds->profession_map.size();
    fairbios::LinearModel model = fairbios::load_model(model_path, cfg.featurizer);
    if (model.num_classes != num_classes)
      fairbios::throw_data("ClassCountMismatch", "checkpoint classes do not match the task");

    auto test_x = fairbios::featurize_batch(texts_of(ds->splits.test), cfg.featurizer);
    std::vector<int> test_y = labels_of(ds->splits.test, gender_task);
    std::vector<int> test_gender = labels_of(ds->splits.test, true);
    std::vector<int> pred(test_x.size());
    for (size_t i = 0; i < test_x.size(); ++i)
      pred[i] = fairbios::predict_label(model, test_x[i]);
    fairbios::FairnessReport report = fairbios::evaluate_predictions(
        "evaluate", task_s, test_y, pred, test_gender, num_classes);
    *report_json_out = dup_string(report.to_json());
  });
}

int fb_mitigate_fit(const char* score_path, char** policy_json_out) {
  if (!score_path || !policy_json_out) return usage_error("fb_mitigate_fit: NULL argument");
  return guarded([&] {
    fairbios::ScoreFile file = fairbios::load_score_file(score_path);
    if (file.scores.empty())
      fairbios::throw_data("SchemaMismatch",
                           "mitigation needs score_0..score_{K-1} columns, not hard labels");
    std::vector<size_t> fit_rows;
    for (size_t i = 0; i < file.y_true.size(); ++i)
      if (file.split_marker.empty() || file.split_marker[i] == 0) fit_rows.push_back(i);
    if (fit_rows.empty()) fairbios::throw_data("SchemaMismatch", "no rows to fit on");

    if (file.num_classes == 2) {
      fairbios::GroupedScores gs;
      for (size_t i : fit_rows) {
        gs.scores.push_back(file.scores[i][1]);
        gs.y_true.push_back(file.y_true[i]);
        gs.group.push_back(file.group[i]);
      }
      *policy_json_out = dup_string(fairbios::fit_eo_policy(gs).to_json());
    } else {
      std::vector<std::vector<double>> scores;
      std::vector<int> y, group;
      for (size_t i : fit_rows) {
        scores.push_back(file.scores[i]);
        y.push_back(file.y_true[i]);
        group.push_back(file.group[i]);
      }
      *policy_json_out =
          dup_string(fairbios::fit_eo_policy_multiclass(scores, y, group, 101).to_json());
    }
  });
}

int fb_mitigate_apply(const char* score_path, const char* policy_json, uint64_t seed,
                      char** preds_csv_out) {
  if (!score_path || !policy_json || !preds_csv_out)
    return usage_error("fb_mitigate_apply: NULL argument");
  return guarded([&] {
    fairbios::ScoreFile file = fairbios::load_score_file(score_path);
    if (file.scores.empty())
      fairbios::throw_data("SchemaMismatch", "mitigation needs score columns");
    nlohmann::json probe = nlohmann::json::parse(policy_json, nullptr, false);
    std::vector<int> pred;
    if (probe.is_array()) {
      fairbios::MulticlassEOPolicy policy = fairbios::MulticlassEOPolicy::from_json(policy_json);
      pred = fairbios::apply_eo_policy_multiclass(policy, file.scores, file.group, seed);
    } else {
      fairbios::EOPolicy policy = fairbios::EOPolicy::from_json(policy_json);
      std::vector<double> s1;
      s1.reserve(file.scores.size());
      for (const auto& row : file.scores) {
        if (row.size() != 2)
          fairbios::throw_data("SchemaMismatch", "binary policy applied to non-binary scores");
        s1.push_back(row[1]);
      }
      pred = fairbios::apply_eo_policy(policy, s1, file.group, seed);
    }
    std::ostringstream ss;
    ss << "y_pred\n";
    for (int p : pred) ss << p << '\n';
    *preds_csv_out = dup_string(ss.str());
  });
}

int fb_run_all(const char* config_json, fb_table** out) {
  if (!config_json || !out) return usage_error("fb_run_all: NULL argument");
  return guarded([&] {
    fairbios::ExperimentConfig cfg = fairbios::ExperimentConfig::from_json(config_json);
    auto table = std::make_unique<fb_table>();
    table->table =
        cfg.out_dir.empty() ? fairbios::run_experiments(cfg) : fairbios::run_all_to_dir(cfg);
    *out = table.release();
  });
}

void fb_table_free(fb_table* table) { delete table; }

int fb_table_render(const fb_table* table, const char* format, char** out) {
  if (!table || !format || !out) return usage_error("fb_table_render: NULL argument");
  return guarded([&] { *out = dup_string(fairbios::emit_table(table->table, format)); });
}

int fb_audit(const char* score_path, char** report_json_out) {
  if (!score_path || !report_json_out) return usage_error("fb_audit: NULL argument");
  return guarded([&] { *report_json_out = dup_string(fairbios::audit_scores(score_path).to_json()); });
}

}  // extern "C"
