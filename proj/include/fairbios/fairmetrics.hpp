#pragma once

#include <string>
#include <vector>

#include "fairbios/common.hpp"

namespace fairbios {

struct ClassPRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t support = 0;
};

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Zero-denominator convention: precision/recall are 0 when their denominator
// is 0, f1 is 0 when precision + recall is 0.
std::vector<ClassPRF> per_class_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                    int num_classes);

// Unweighted mean of per-class F1 over all num_classes classes; zero-support
// classes contribute 0.
double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred, int num_classes);

// Max-minus-min selection rate across groups.
double demographic_parity_difference(const std::vector<int>& y_pred, const std::vector<int>& group,
                                     int positive_class);

// max(TPR gap, FPR gap) across groups. Group cells with a zero denominator
// contribute rate 0; when that happens *zero_denominator_flag (if given) is
// set instead of raising an error.
double equalized_odds_difference(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<int>& group, int positive_class,
                                 bool* zero_denominator_flag = nullptr);

struct MulticlassFairness {
  double dpd = 0.0;       // max over one-vs-rest classes
  double eod = 0.0;       // max over one-vs-rest classes
  double dpd_mean = 0.0;  // mean aggregation, reported as a secondary column
  double eod_mean = 0.0;
  bool zero_denominator_flag = false;
};

MulticlassFairness multiclass_fairness(const std::vector<int>& y_true,
                                       const std::vector<int>& y_pred,
                                       const std::vector<int>& group, int num_classes);

// One experiment row.
struct FairnessReport {
  std::string condition;
  std::string task;
  size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double dpd = 0.0;
  double eod = 0.0;
  double dpd_mean = 0.0;
  double eod_mean = 0.0;
  std::vector<ClassPRF> per_class;
  bool zero_denominator_flag = false;
  std::string notes;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

FairnessReport evaluate_predictions(const std::string& condition, const std::string& task,
                                    const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                    const std::vector<int>& group, int num_classes);

}  // namespace fairbios
