#include "fairbios/fairmetrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

namespace fairbios {

namespace {

void check_lengths(size_t a, size_t b, const char* what) {
  if (a != b) throw_data("LengthMismatch", std::string(what) + ": lengths differ");
  if (a == 0) throw_data("Empty", std::string(what) + ": empty input");
}

void check_labels(const std::vector<int>& y, int num_classes, const char* what) {
  for (int v : y) {
    if (v < 0 || v >= num_classes)
      throw_data("LabelOutOfRange", std::string(what) + ": label " + std::to_string(v) +
                                        " outside [0," + std::to_string(num_classes) + ")");
  }
}

}  // namespace

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_lengths(y_true.size(), y_pred.size(), "accuracy");
  size_t hits = 0;
  for (size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<ClassPRF> per_class_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                    int num_classes) {
  check_lengths(y_true.size(), y_pred.size(), "per_class_prf");
  check_labels(y_true, num_classes, "per_class_prf y_true");
  check_labels(y_pred, num_classes, "per_class_prf y_pred");
  std::vector<size_t> tp(static_cast<size_t>(num_classes), 0);
  std::vector<size_t> fp(static_cast<size_t>(num_classes), 0);
  std::vector<size_t> fn(static_cast<size_t>(num_classes), 0);
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) {
      tp[static_cast<size_t>(y_true[i])]++;
    } else {
      fp[static_cast<size_t>(y_pred[i])]++;
      fn[static_cast<size_t>(y_true[i])]++;
    }
  }
  std::vector<ClassPRF> out(static_cast<size_t>(num_classes));
  for (size_t c = 0; c < out.size(); ++c) {
    ClassPRF& m = out[c];
    m.support = tp[c] + fn[c];
    size_t pdenom = tp[c] + fp[c];
    size_t rdenom = tp[c] + fn[c];
    m.precision = pdenom ? static_cast<double>(tp[c]) / static_cast<double>(pdenom) : 0.0;
    m.recall = rdenom ? static_cast<double>(tp[c]) / static_cast<double>(rdenom) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }
  return out;
}

double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred, int num_classes) {
  auto prf = per_class_prf(y_true, y_pred, num_classes);
  double sum = 0.0;
  for (const auto& m : prf) sum += m.f1;
  return sum / static_cast<double>(num_classes);
}

double demographic_parity_difference(const std::vector<int>& y_pred, const std::vector<int>& group,
                                     int positive_class) {
  check_lengths(y_pred.size(), group.size(), "demographic_parity_difference");
  std::map<int, std::pair<size_t, size_t>> per_group;  // group -> (positives, total)
  for (size_t i = 0; i < y_pred.size(); ++i) {
    auto& cell = per_group[group[i]];
    if (y_pred[i] == positive_class) cell.first++;
    cell.second++;
  }
  if (per_group.size() < 2)
    throw_data("SingleGroup", "demographic parity needs at least 2 groups");
  double lo = 1.0, hi = 0.0;
  for (const auto& [g, cell] : per_group) {
    double rate = static_cast<double>(cell.first) / static_cast<double>(cell.second);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  return hi - lo;
}

double equalized_odds_difference(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<int>& group, int positive_class,
                                 bool* zero_denominator_flag) {
  check_lengths(y_true.size(), y_pred.size(), "equalized_odds_difference");
  check_lengths(y_true.size(), group.size(), "equalized_odds_difference");
  struct Cell {
    size_t tp = 0, fn = 0, fp = 0, tn = 0;
  };
  std::map<int, Cell> per_group;
  size_t pos_total = 0, neg_total = 0;
  for (size_t i = 0; i < y_true.size(); ++i) {
    Cell& c = per_group[group[i]];
    bool truth = y_true[i] == positive_class;
    bool pred = y_pred[i] == positive_class;
    if (truth) {
      ++pos_total;
      pred ? ++c.tp : ++c.fn;
    } else {
      ++neg_total;
      pred ? ++c.fp : ++c.tn;
    }
  }
  if (per_group.size() < 2) throw_data("SingleGroup", "equalized odds needs at least 2 groups");
  if (pos_total == 0) throw_data("NoPositives", "no positive true labels overall");
  if (neg_total == 0) throw_data("NoNegatives", "no negative true labels overall");

  double tpr_lo = 1.0, tpr_hi = 0.0, fpr_lo = 1.0, fpr_hi = 0.0;
  bool flagged = false;
  for (const auto& [g, c] : per_group) {
    double tpr = 0.0, fpr = 0.0;
    if (c.tp + c.fn > 0)
      tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    else
      flagged = true;
    if (c.fp + c.tn > 0)
      fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    else
      flagged = true;
    tpr_lo = std::min(tpr_lo, tpr);
    tpr_hi = std::max(tpr_hi, tpr);
    fpr_lo = std::min(fpr_lo, fpr);
    fpr_hi = std::max(fpr_hi, fpr);
  }
  if (zero_denominator_flag) *zero_denominator_flag = flagged;
  return std::max(tpr_hi - tpr_lo, fpr_hi - fpr_lo);
}

MulticlassFairness multiclass_fairness(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred,
                                       const std::vector<int>& group, int num_classes) {
  check_labels(y_true, num_classes, "multiclass_fairness y_true");
  check_labels(y_pred, num_classes, "multiclass_fairness y_pred");
  MulticlassFairness out;
  double dpd_sum = 0.0, eod_sum = 0.0;
  int eod_classes = 0;
  for (int c = 0; c < num_classes; ++c) {
    double d = demographic_parity_difference(y_pred, group, c);
    out.dpd = std::max(out.dpd, d);
    dpd_sum += d;
    // A class absent from y_true (or covering all of it) has no one-vs-rest
    // positives/negatives; it is skipped rather than aborting the report.
    size_t pos = static_cast<size_t>(std::count(y_true.begin(), y_true.end(), c));
    if (pos == 0 || pos == y_true.size()) {
      out.zero_denominator_flag = true;
      continue;
    }
    bool flag = false;
    double e = equalized_odds_difference(y_true, y_pred, group, c, &flag);
    out.zero_denominator_flag = out.zero_denominator_flag || flag;
    out.eod = std::max(out.eod, e);
    eod_sum += e;
    ++eod_classes;
  }
  out.dpd_mean = dpd_sum / static_cast<double>(num_classes);
  out.eod_mean = eod_classes ? eod_sum / static_cast<double>(eod_classes) : 0.0;
  return out;
}

std::string FairnessReport::to_json() const {
  nlohmann::json j;
  j["condition"] = condition;
  j["task"] = task;
  j["n"] = n;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["dpd"] = dpd;
  j["eod"] = eod;
  j["dpd_mean"] = dpd_mean;
  j["eod_mean"] = eod_mean;
  j["zero_denominator_flag"] = zero_denominator_flag;
  if (!notes.empty()) j["notes"] = notes;
  nlohmann::json pc = nlohmann::json::array();
  for (const auto& m : per_class) {
    pc.push_back({{"precision", m.precision},
                  {"recall", m.recall},
                  {"f1", m.f1},
                  {"support", m.support}});
  }
  j["per_class"] = pc;
  return j.dump(2);
}

std::string FairnessReport::csv_header() {
  return "condition,task,n,accuracy,macro_f1,dpd,eod,dpd_mean,eod_mean,flagged";
}

std::string FairnessReport::to_csv_row() const {
  std::ostringstream ss;
  ss << condition << ',' << task << ',' << n << ',' << format_fixed(accuracy, 3) << ','
     << format_fixed(macro_f1, 3) << ',' << format_fixed(dpd, 3) << ',' << format_fixed(eod, 3)
     << ',' << format_fixed(dpd_mean, 3) << ',' << format_fixed(eod_mean, 3) << ','
     << (zero_denominator_flag ? 1 : 0);
  return ss.str();
}

FairnessReport evaluate_predictions(const std::string& condition, const std::string& task,
                                    const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                    const std::vector<int>& group, int num_classes) {
  FairnessReport r;
  r.condition = condition;
  r.task = task;
  r.n = y_true.size();
  r.accuracy = accuracy(y_true, y_pred);
  r.macro_f1 = macro_f1(y_true, y_pred, num_classes);
  r.per_class = per_class_prf(y_true, y_pred, num_classes);
  MulticlassFairness mf = multiclass_fairness(y_true, y_pred, group, num_classes);
  r.dpd = mf.dpd;
  r.eod = mf.eod;
  r.dpd_mean = mf.dpd_mean;
  r.eod_mean = mf.eod_mean;
  r.zero_denominator_flag = mf.zero_denominator_flag;
  return r;
}

}  // namespace fairbios
