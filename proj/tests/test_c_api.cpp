#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "fairbios/fairbios.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

const char* kSynthConfig = R"({"n": 1200, "num_professions": 3, "seed": 42})";

}  // namespace

TEST_CASE("null arguments are usage errors with a message") {
  CHECK(fb_synth_generate(nullptr, "x.csv", nullptr) == FB_ERR_USAGE);
  CHECK(std::strlen(fb_last_error()) > 0);
  CHECK(fb_dataset_load(nullptr, 0, nullptr) == FB_ERR_USAGE);
  CHECK(fb_audit(nullptr, nullptr) == FB_ERR_USAGE);
}

TEST_CASE("error codes map to error categories") {
  fb_dataset* ds = nullptr;
  CHECK(fb_dataset_load("/no/such/file.csv", 0, &ds) == FB_ERR_DATA);
  CHECK(std::string(fb_last_error()).find("FileNotFound") != std::string::npos);

  CHECK(fb_synth_generate("{\"n\": 1}", "/tmp/fb_never.csv", nullptr) == FB_ERR_USAGE);
}

TEST_CASE("synth, load, distribution, train, evaluate through the C API") {
  TempDir dir("fb_capi_flow");
  REQUIRE(fb_synth_generate(kSynthConfig, dir.file("corpus.csv").c_str(),
                            dir.file("sidecar.json").c_str()) == FB_OK);
  CHECK(std::filesystem::exists(dir.file("sidecar.json")));

  fb_dataset* ds = nullptr;
  REQUIRE(fb_dataset_load(dir.file("corpus.csv").c_str(), 5, &ds) == FB_OK);

  char* text = nullptr;
  REQUIRE(fb_dataset_distribution(ds, dir.file("dist").c_str(), &text) == FB_OK);
  CHECK(std::string(text).find("train") != std::string::npos);
  fb_string_free(text);

  const char* cfg = R"({"seed": 5, "train": {"max_epochs": 2}, "featurizer": {"dim": 16384}})";
  char* report = nullptr;
  REQUIRE(fb_train(ds, "gender", "baseline", cfg, dir.file("model.bin").c_str(), &report) ==
          FB_OK);
  CHECK(std::string(report).find("best_epoch") != std::string::npos);
  fb_string_free(report);

  CHECK(fb_train(ds, "gender", "postproc_eo", cfg, dir.file("m2.bin").c_str(), nullptr) ==
        FB_ERR_USAGE);

  char* eval_json = nullptr;
  REQUIRE(fb_evaluate(ds, "gender", dir.file("model.bin").c_str(), cfg, &eval_json) == FB_OK);
  std::string ej = eval_json;
  fb_string_free(eval_json);
  CHECK(ej.find("\"accuracy\"") != std::string::npos);

  // Mismatched featurizer settings are refused.
  char* bad = nullptr;
  CHECK(fb_evaluate(ds, "gender", dir.file("model.bin").c_str(), nullptr, &bad) == FB_ERR_DATA);

  fb_dataset_free(ds);
  fb_dataset_free(nullptr);
}

TEST_CASE("mitigate fit and apply through the C API") {
  TempDir dir("fb_capi_mitigate");
  {
    std::ofstream out(dir.file("scores.csv"));
    out << "y_true,group,score_0,score_1\n";
    unsigned state = 12345;
    for (int i = 0; i < 600; ++i) {
      state = state * 1103515245u + 12345u;
      int y = (state >> 16) & 1;
      int g = (state >> 17) & 1;
      double u = double((state >> 8) & 0xFFFF) / 65536.0;
      double s1 = y ? 0.55 + 0.45 * u : 0.45 * u;
      out << y << ',' << g << ',' << (1.0 - s1) << ',' << s1 << '\n';
    }
  }
  char* policy = nullptr;
  REQUIRE(fb_mitigate_fit(dir.file("scores.csv").c_str(), &policy) == FB_OK);
  std::string policy_json = policy;
  fb_string_free(policy);
  CHECK(policy_json.find("\"groups\"") != std::string::npos);

  char* preds = nullptr;
  REQUIRE(fb_mitigate_apply(dir.file("scores.csv").c_str(), policy_json.c_str(), 3, &preds) ==
          FB_OK);
  std::string preds_csv = preds;
  fb_string_free(preds);
  CHECK(preds_csv.rfind("y_pred\n", 0) == 0);
  CHECK(std::count(preds_csv.begin(), preds_csv.end(), '\n') == 601);

  CHECK(fb_mitigate_apply(dir.file("scores.csv").c_str(), "not json", 0, &preds) ==
        FB_ERR_DATA);
}

TEST_CASE("run-all handle: render formats and byte-identical reruns") {
  TempDir dir("fb_capi_runall");
  std::string cfg = std::string(R"({"synth": )") + kSynthConfig +
                    R"(, "tasks": ["gender"], "conditions": ["baseline", "postproc_eo"],
                       "seed": 9, "train": {"max_epochs": 2}, "featurizer": {"dim": 16384}})";
  fb_table* t1 = nullptr;
  REQUIRE(fb_run_all(cfg.c_str(), &t1) == FB_OK);
  char* csv1 = nullptr;
  REQUIRE(fb_table_render(t1, "csv", &csv1) == FB_OK);
  char* md = nullptr;
  REQUIRE(fb_table_render(t1, "markdown", &md) == FB_OK);
  CHECK(std::string(md).rfind("| Method |", 0) == 0);
  fb_string_free(md);
  CHECK(fb_table_render(t1, "xml", &md) == FB_ERR_USAGE);

  fb_table* t2 = nullptr;
  REQUIRE(fb_run_all(cfg.c_str(), &t2) == FB_OK);
  char* csv2 = nullptr;
  REQUIRE(fb_table_render(t2, "csv", &csv2) == FB_OK);
  CHECK(std::string(csv1) == std::string(csv2));
  fb_string_free(csv1);
  fb_string_free(csv2);
  fb_table_free(t1);
  fb_table_free(t2);
}

TEST_CASE("audit through the C API") {
  TempDir dir("fb_capi_audit");
  {
    std::ofstream out(dir.file("scores.csv"));
    out << "y_true,group,y_pred\n0,0,0\n1,0,1\n0,1,1\n1,1,0\n";
  }
  char* report = nullptr;
  REQUIRE(fb_audit(dir.file("scores.csv").c_str(), &report) == FB_OK);
  CHECK(std::string(report).find("\"accuracy\": 0.5") != std::string::npos);
  fb_string_free(report);
}
