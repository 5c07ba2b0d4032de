// Command-line front end. Talks to the library exclusively through the C API
// in fairbios/fairbios.h.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairbios/fairbios.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct StringOut {
  char* value = nullptr;
  ~StringOut() { fb_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

int report_error(int code) {
  std::cerr << "error: " << fb_last_error() << "\n";
  return code;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Key-value config file: one `key=value` per line, '#' comments. Values fill
// in options the command line left at their defaults.
std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (!key.empty()) out[key] = value;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("file", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Shared flags; config-file values apply only where the command line used the
// default (CLI > config file > defaults).
struct CommonOpts {
  std::string data;
  std::string synth_config;
  std::string config_file;
  std::string out_dir = ".";
  std::string format = "markdown";
  std::string tasks = "gender,profession";
  std::string conditions = "baseline,oversampling,loss_weighting,postproc_eo";
  uint64_t seed = 0;
  bool joint_balance = false;

  CLI::Option* data_opt = nullptr;
  CLI::Option* synth_opt = nullptr;
  CLI::Option* out_dir_opt = nullptr;
  CLI::Option* format_opt = nullptr;
  CLI::Option* tasks_opt = nullptr;
  CLI::Option* conditions_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    data_opt = cmd->add_option("--data", data, "Corpus file (CSV or JSONL)");
    synth_opt = cmd->add_option("--synth-config", synth_config, "Synthetic corpus config (JSON)");
    cmd->add_option("--config", config_file, "key=value config file");
    seed_opt = cmd->add_option("--seed", seed, "Master seed");
    tasks_opt = cmd->add_option("--tasks", tasks, "Comma-separated tasks");
    conditions_opt = cmd->add_option("--conditions", conditions, "Comma-separated conditions");
    out_dir_opt = cmd->add_option("--out-dir", out_dir, "Output directory");
    format_opt = cmd->add_option("--format", format, "Table format: csv, json, markdown");
    cmd->add_flag("--joint-balance", joint_balance,
                  "Oversample joint (gender, profession) cells (extension)");
  }

  void apply_config() {
    if (config_file.empty()) return;
    auto kv = read_config_file(config_file);
    auto fill = [&](CLI::Option* opt, const char* key, auto& target) {
      auto it = kv.find(key);
      if (it == kv.end() || (opt && opt->count() > 0)) return;
      std::stringstream ss(it->second);
      ss >> target;
    };
    fill(data_opt, "data", data);
    fill(synth_opt, "synth_config", synth_config);
    fill(seed_opt, "seed", seed);
    fill(tasks_opt, "tasks", tasks);
    fill(conditions_opt, "conditions", conditions);
    fill(out_dir_opt, "out_dir", out_dir);
    fill(format_opt, "format", format);
  }

  std::string experiment_json() const {
    nlohmann::json j;
    if (!data.empty()) j["data"] = data;
    if (!synth_config.empty())
      j["synth"] = nlohmann::json::parse(read_text_file(synth_config));
    j["tasks"] = split_list(tasks);
    j["conditions"] = split_list(conditions);
    j["seed"] = seed;
    if (!out_dir.empty()) j["out_dir"] = out_dir;
    j["joint_balance"] = joint_balance;
    return j.dump();
  }
};

struct Dataset {
  fb_dataset* handle = nullptr;
  ~Dataset() { fb_dataset_free(handle); }
};

int load_dataset(const CommonOpts& opts, Dataset& ds) {
  if (opts.data.empty()) {
    std::cerr << "error: --data is required for this subcommand\n";
    return kExitUsage;
  }
  int rc = fb_dataset_load(opts.data.c_str(), opts.seed, &ds.handle);
  if (rc != FB_OK) return report_error(rc);
  return FB_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias measurement and mitigation toolkit for text classification"};
  app.require_subcommand(1);

  CommonOpts prep_opts, synth_opts, train_opts, eval_opts, run_opts;
  std::string task = "gender", condition = "baseline";
  std::string model_path = "model.bin";
  std::string scores_path, policy_path, preds_path;
  bool mitigate_apply = false;
  uint64_t mitigate_seed = 0;

  CLI::App* prep = app.add_subcommand("prep", "Load, normalize, split and report distributions");
  prep_opts.attach(prep);

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic biased corpus");
  synth_opts.attach(synth);

  CLI::App* train_cmd = app.add_subcommand("train", "Train a classifier on the train split");
  train_opts.attach(train_cmd);
  train_cmd->add_option("--task", task, "gender or profession");
  train_cmd->add_option("--condition", condition, "baseline, oversampling or loss_weighting");
  train_cmd->add_option("--model-out", model_path, "Checkpoint path");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test split");
  eval_opts.attach(evaluate);
  evaluate->add_option("--task", task, "gender or profession");
  evaluate->add_option("--model", model_path, "Checkpoint path");

  CLI::App* mitigate = app.add_subcommand("mitigate", "Fit/apply equalized odds on a score file");
  mitigate->add_option("--scores", scores_path, "Score CSV (y_true, group, score_*)")->required();
  mitigate->add_option("--policy-out", policy_path, "Write the fitted policy JSON here");
  mitigate->add_flag("--apply", mitigate_apply, "Also apply the policy to every row");
  mitigate->add_option("--preds-out", preds_path, "Write predictions CSV here (with --apply)");
  mitigate->add_option("--seed", mitigate_seed, "Seed for randomized thresholds");

  CLI::App* run_all = app.add_subcommand("run-all", "Run the full task x condition grid");
  run_opts.attach(run_all);

  CLI::App* audit = app.add_subcommand("audit", "Audit an external score file");
  audit->add_option("--scores", scores_path, "Score CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (prep->parsed()) {
      prep_opts.apply_config();
      Dataset ds;
      int rc = load_dataset(prep_opts, ds);
      if (rc != FB_OK) return rc;
      StringOut text;
      rc = fb_dataset_distribution(ds.handle, prep_opts.out_dir.c_str(), &text.value);
      if (rc != FB_OK) return report_error(rc);
      std::cout << text.str();
      return 0;
    }

    if (synth->parsed()) {
      synth_opts.apply_config();
      if (synth_opts.synth_config.empty()) {
        std::cerr << "error: synth requires --synth-config\n";
        return kExitUsage;
      }
      std::string cfg = read_text_file(synth_opts.synth_config);
      std::string csv = synth_opts.out_dir + "/synth.csv";
      std::string sidecar = synth_opts.out_dir + "/synth_groundtruth.json";
      int rc = fb_synth_generate(cfg.c_str(), csv.c_str(), sidecar.c_str());
      if (rc != FB_OK) return report_error(rc);
      std::cout << "wrote " << csv << " and " << sidecar << "\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      train_opts.apply_config();
      Dataset ds;
      int rc = load_dataset(train_opts, ds);
      if (rc != FB_OK) return rc;
      std::string cfg = train_opts.experiment_json();
      StringOut report;
      rc = fb_train(ds.handle, task.c_str(), condition.c_str(), cfg.c_str(),
                    model_path.c_str(), &report.value);
      if (rc != FB_OK) return report_error(rc);
      std::cout << report.str() << "\n";
      return 0;
    }

    if (evaluate->parsed()) {
      eval_opts.apply_config();
      Dataset ds;
      int rc = load_dataset(eval_opts, ds);
      if (rc != FB_OK) return rc;
      std::string cfg = eval_opts.experiment_json();
      StringOut report;
      rc = fb_evaluate(ds.handle, task.c_str(), model_path.c_str(), cfg.c_str(), &report.value);
      if (rc != FB_OK) return report_error(rc);
      std::cout << report.str() << "\n";
      return 0;
    }

    if (mitigate->parsed()) {
      StringOut policy;
      int rc = fb_mitigate_fit(scores_path.c_str(), &policy.value);
      if (rc != FB_OK) return report_error(rc);
      if (!policy_path.empty()) {
        std::ofstream out(policy_path, std::ios::binary);
        out << policy.str();
        if (!out) {
          std::cerr << "error: cannot write " << policy_path << "\n";
          return kExitData;
        }
      } else {
        std::cout << policy.str() << "\n";
      }
      if (mitigate_apply) {
        StringOut preds;
        rc = fb_mitigate_apply(scores_path.c_str(), policy.str().c_str(), mitigate_seed,
                               &preds.value);
        if (rc != FB_OK) return report_error(rc);
        if (!preds_path.empty()) {
          std::ofstream out(preds_path, std::ios::binary);
          out << preds.str();
          if (!out) {
            std::cerr << "error: cannot write " << preds_path << "\n";
            return kExitData;
          }
        } else {
          std::cout << preds.str();
        }
      }
      return 0;
    }

    if (run_all->parsed()) {
      run_opts.apply_config();
      std::string cfg = run_opts.experiment_json();
      fb_table* table = nullptr;
      int rc = fb_run_all(cfg.c_str(), &table);
      if (rc != FB_OK) return report_error(rc);
      StringOut rendered;
      rc = fb_table_render(table, run_opts.format.c_str(), &rendered.value);
      fb_table_free(table);
      if (rc != FB_OK) return report_error(rc);
      std::cout << rendered.str();
      return 0;
    }

    if (audit->parsed()) {
      StringOut report;
      int rc = fb_audit(scores_path.c_str(), &report.value);
      if (rc != FB_OK) return report_error(rc);
      std::cout << report.str() << "\n";
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
