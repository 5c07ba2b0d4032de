#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "fairbios/fairmetrics.hpp"

using namespace fairbios;

namespace {

struct Bundle {
  std::vector<int> y_true, y_pred, group;
  int num_classes = 0;
};

Bundle random_bundle(Rng& rng, size_t max_n = 200, int max_k = 6, int max_groups = 4) {
  Bundle b;
  size_t n = 2 + rng.next_below(max_n - 1);
  b.num_classes = 2 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_k - 1)));
  int groups = 2 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_groups - 1)));
  for (size_t i = 0; i < n; ++i) {
    b.y_true.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(b.num_classes))));
    b.y_pred.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(b.num_classes))));
    b.group.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(groups))));
  }
  // Ensure at least two distinct groups are present.
  b.group[0] = 0;
  b.group[n - 1] = 1;
  return b;
}

// Brute-force oracle: recount everything from scratch with nested loops.
double oracle_accuracy(const Bundle& b) {
  size_t hits = 0;
  for (size_t i = 0; i < b.y_true.size(); ++i)
    if (b.y_true[i] == b.y_pred[i]) ++hits;
  return double(hits) / double(b.y_true.size());
}

void oracle_counts(const Bundle& b, int c, size_t& tp, size_t& fp, size_t& fn) {
  tp = fp = fn = 0;
  for (size_t i = 0; i < b.y_true.size(); ++i) {
    if (b.y_pred[i] == c && b.y_true[i] == c) ++tp;
    if (b.y_pred[i] == c && b.y_true[i] != c) ++fp;
    if (b.y_pred[i] != c && b.y_true[i] == c) ++fn;
  }
}

double oracle_dpd(const Bundle& b, int positive) {
  std::map<int, std::pair<size_t, size_t>> per_group;
  for (size_t i = 0; i < b.y_pred.size(); ++i) {
    per_group[b.group[i]].second++;
    if (b.y_pred[i] == positive) per_group[b.group[i]].first++;
  }
  double lo = 1.0, hi = 0.0;
  for (auto& [g, cell] : per_group) {
    double r = double(cell.first) / double(cell.second);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi - lo;
}

double oracle_eod(const Bundle& b, int positive) {
  std::map<int, std::array<size_t, 4>> cells;  // tp, fn, fp, tn
  for (size_t i = 0; i < b.y_true.size(); ++i) {
    auto& c = cells[b.group[i]];
    bool t = b.y_true[i] == positive, p = b.y_pred[i] == positive;
    if (t && p) c[0]++;
    if (t && !p) c[1]++;
    if (!t && p) c[2]++;
    if (!t && !p) c[3]++;
  }
  double tpr_lo = 1, tpr_hi = 0, fpr_lo = 1, fpr_hi = 0;
  for (auto& [g, c] : cells) {
    double tpr = c[0] + c[1] ? double(c[0]) / double(c[0] + c[1]) : 0.0;
    double fpr = c[2] + c[3] ? double(c[2]) / double(c[2] + c[3]) : 0.0;
    tpr_lo = std::min(tpr_lo, tpr);
    tpr_hi = std::max(tpr_hi, tpr);
    fpr_lo = std::min(fpr_lo, fpr);
    fpr_hi = std::max(fpr_hi, fpr);
  }
  return std::max(tpr_hi - tpr_lo, fpr_hi - fpr_lo);
}

}  // namespace

TEST_CASE("accuracy, PRF, macro-F1 against the counting oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    Bundle b = random_bundle(rng);
    CHECK(accuracy(b.y_true, b.y_pred) == doctest::Approx(oracle_accuracy(b)).epsilon(1e-12));
    auto prf = per_class_prf(b.y_true, b.y_pred, b.num_classes);
    double f1_sum = 0.0;
    for (int c = 0; c < b.num_classes; ++c) {
      size_t tp, fp, fn;
      oracle_counts(b, c, tp, fp, fn);
      const auto& m = prf[size_t(c)];
      CHECK(m.support == tp + fn);
      double p = tp + fp ? double(tp) / double(tp + fp) : 0.0;
      double r = tp + fn ? double(tp) / double(tp + fn) : 0.0;
      CHECK(std::abs(m.precision - p) <= 1e-12);
      CHECK(std::abs(m.recall - r) <= 1e-12);
      double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
      CHECK(std::abs(m.f1 - f1) <= 1e-12);
      f1_sum += f1;
    }
    CHECK(std::abs(macro_f1(b.y_true, b.y_pred, b.num_classes) - f1_sum / b.num_classes) <=
          1e-12);
  }
}

TEST_CASE("DPD and EOD against the counting oracle") {
  Rng rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    Bundle b = random_bundle(rng);
    for (int c = 0; c < b.num_classes; ++c) {
      CHECK(std::abs(demographic_parity_difference(b.y_pred, b.group, c) - oracle_dpd(b, c)) <=
            1e-12);
      size_t pos = 0;
      for (int y : b.y_true) pos += y == c;
      if (pos == 0 || pos == b.y_true.size()) continue;
      CHECK(std::abs(equalized_odds_difference(b.y_true, b.y_pred, b.group, c) -
                     oracle_eod(b, c)) <= 1e-12);
    }
  }
}

TEST_CASE("macro-F1 counts zero-support classes") {
  // Classes 0 and 1 perfect, class 2 absent: mean over all 3 classes.
  std::vector<int> y = {0, 1, 0, 1};
  CHECK(macro_f1(y, y, 3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("EOD zero-denominator cells contribute rate 0 and set the flag") {
  // Group 1 has no true positives.
  std::vector<int> y_true = {1, 1, 0, 0};
  std::vector<int> y_pred = {1, 0, 0, 0};
  std::vector<int> group = {0, 0, 1, 1};
  bool flag = false;
  double eod = equalized_odds_difference(y_true, y_pred, group, 1, &flag);
  CHECK(flag);
  CHECK(eod == doctest::Approx(0.5));  // group 0 TPR 0.5 vs the 0 convention
}

TEST_CASE("fairness metric error cases") {
  std::vector<int> y = {0, 1};
  CHECK_THROWS_AS(accuracy(y, std::vector<int>{0}), Error);
  CHECK_THROWS_AS(accuracy({}, {}), Error);
  CHECK_THROWS_AS(per_class_prf({0, 5}, {0, 1}, 2), Error);
  CHECK_THROWS_AS(demographic_parity_difference(y, {0, 0}, 1), Error);
  CHECK_THROWS_AS(equalized_odds_difference({0, 0}, {0, 0}, {0, 1}, 1), Error);  // no positives
  CHECK_THROWS_AS(equalized_odds_difference({1, 1}, {1, 1}, {0, 1}, 1), Error);  // no negatives
}

TEST_CASE("multiclass fairness is the max over one-vs-rest classes") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    Bundle b = random_bundle(rng);
    MulticlassFairness mf = multiclass_fairness(b.y_true, b.y_pred, b.group, b.num_classes);
    double dpd_max = 0.0, eod_max = 0.0;
    for (int c = 0; c < b.num_classes; ++c) {
      dpd_max = std::max(dpd_max, oracle_dpd(b, c));
      size_t pos = 0;
      for (int y : b.y_true) pos += y == c;
      if (pos == 0 || pos == b.y_true.size()) continue;
      eod_max = std::max(eod_max, oracle_eod(b, c));
    }
    CHECK(std::abs(mf.dpd - dpd_max) <= 1e-12);
    CHECK(std::abs(mf.eod - eod_max) <= 1e-12);
    CHECK(mf.dpd_mean <= mf.dpd + 1e-12);
    CHECK(mf.eod_mean <= mf.eod + 1e-12);
  }
}

TEST_CASE("report serialization carries the headline numbers") {
  std::vector<int> y_true = {0, 1, 0, 1}, y_pred = {0, 1, 1, 1}, group = {0, 0, 1, 1};
  FairnessReport r = evaluate_predictions("baseline", "gender", y_true, y_pred, group, 2);
  CHECK(r.n == 4);
  CHECK(r.accuracy == doctest::Approx(0.75));
  std::string json = r.to_json();
  CHECK(json.find("\"condition\": \"baseline\"") != std::string::npos);
  std::string row = r.to_csv_row();
  CHECK(row.substr(0, row.find(',')) == "baseline");
  CHECK(FairnessReport::csv_header().find("eod") != std::string::npos);
}
