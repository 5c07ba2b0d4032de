#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fairbios/corpus.hpp"

namespace fairbios {

enum class TargetLabel { Gender, Profession };

// Random oversampling with replacement: every class is topped up to the
// majority count by duplicating its own records. Apply to the training split
// only; dev and test are left intact by the caller.
std::vector<Record> oversample(const std::vector<Record>& train, TargetLabel target,
                               int num_classes, uint64_t seed);

// Balanced inverse-frequency weights: weights[c] = N / (K * n_c).
std::vector<double> compute_class_weights(const std::vector<int>& labels, int num_classes);

// Scores with binary labels and a sensitive-group id per sample.
struct GroupedScores {
  std::vector<double> scores;  // positive-class probability in [0,1]
  std::vector<int> y_true;     // 0/1
  std::vector<int> group;

  void validate() const;
};

// Per-group randomized threshold rule. A sample in group g is classified
// positive iff score >= t, where t is t_lo with probability mix and t_hi
// otherwise. Thresholds live in [0,2]: t = 0 accepts everything, t = 2
// rejects everything (scores are probabilities in [0,1]).
struct GroupThresholds {
  double t_lo = 0.5;
  double t_hi = 0.5;
  double mix = 1.0;  // probability of using t_lo
  bool degenerate = false;
  bool missing_class = false;
};

struct EOPolicy {
  std::map<int, GroupThresholds> groups;
  double target_tpr = 0.0;
  double target_fpr = 0.0;
  int positive_class = 1;
  bool label_equals_group = false;  // degenerate fit, see fit_eo_policy
  bool pass_through = false;        // cell skipped in the multiclass reduction

  std::string to_json() const;
  static EOPolicy from_json(const std::string& json);
};

// Accuracy slack granted to the degenerate (group == label) fallback fit; see
// fit_eo_policy.
inline constexpr double kDegenerateAccuracySlack = 0.02;

// Fits per-group randomized thresholds whose analytic operating points on the
// fitting data coincide at a common (TPR*, FPR*), chosen to maximize expected
// accuracy on the fitting data. Candidate targets are taken along the
// feasible frontier (the pointwise minimum of the groups' ROC upper hulls),
// restricted to points each group can hit exactly as a two-threshold mixture.
//
// Special cases:
//  - a group with all-identical scores falls back to a single threshold and
//    is flagged degenerate;
//  - when the group ids coincide with the labels (every group is single
//    class), exact equalized odds only admits degenerate rules; the fit
//    instead equalizes each group's correct-classification rate at C = best
//    single-threshold accuracy minus kDegenerateAccuracySlack (TPR = C for
//    all-positive groups, FPR = 1 - C for all-negative ones) and sets
//    label_equals_group.
EOPolicy fit_eo_policy(const GroupedScores& data, int grid_resolution = 101);

// Seeded counter-stream application; the draw for sample i depends only on
// (seed, i), not on iteration order.
std::vector<int> apply_eo_policy(const EOPolicy& policy, const std::vector<double>& scores,
                                 const std::vector<int>& group, uint64_t seed);

// Analytic operating point of the randomized rule for one group, computed on
// the given data (in expectation over the mixing coin, not sampled).
std::pair<double, double> analytic_operating_point(const GroupThresholds& g,
                                                   const std::vector<double>& scores,
                                                   const std::vector<int>& y_true);

struct MulticlassEOPolicy {
  std::vector<EOPolicy> per_class;  // one one-vs-rest policy per class

  std::string to_json() const;
  static MulticlassEOPolicy from_json(const std::string& json);
};

// One-vs-rest reduction: class c's policy is fit on (score_c, y == c, group).
// (class, group) cells without both a positive and a negative example are
// flagged and inherit a pass-through policy (fixed threshold 0.5).
MulticlassEOPolicy fit_eo_policy_multiclass(const std::vector<std::vector<double>>& scores,
                                            const std::vector<int>& y_true,
                                            const std::vector<int>& group,
                                            int grid_resolution = 101);

// Adjusted-margin decision: label = argmax_c (score_c - threshold_c), with the
// per-sample threshold drawn from class c's policy for the sample's group;
// ties break to the lowest class id.
std::vector<int> apply_eo_policy_multiclass(const MulticlassEOPolicy& policy,
                                            const std::vector<std::vector<double>>& scores,
                                            const std::vector<int>& group, uint64_t seed);

}  // namespace fairbios
