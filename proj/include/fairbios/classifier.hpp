#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairbios/featurize.hpp"

namespace fairbios {

// K-class softmax linear model over D hashed features.
struct LinearModel {
  int num_classes = 0;
  uint32_t dim = 0;
  std::vector<double> weights;  // row-major, num_classes x dim
  std::vector<double> bias;     // num_classes

  double& w(int k, uint32_t j) { return weights[static_cast<size_t>(k) * dim + j]; }
  double w(int k, uint32_t j) const { return weights[static_cast<size_t>(k) * dim + j]; }

  static LinearModel zeros(int num_classes, uint32_t dim);
};

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 16;
  int max_epochs = 6;
  double warmup_fraction = 0.1;
  int early_stop_patience = 2;
  uint64_t seed = 0;
  double l2_penalty = 1e-6;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double dev_macro_f1 = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // index into epochs; ties go to the earliest epoch
  bool stopped_early = false;
};

// Weighted cross-entropy over one batch, normalized by the batch weight sum,
// plus l2_penalty * ||weights||^2. Writes the exact analytic gradient into
// (grad_weights, grad_bias), both sized like the model.
double loss_and_grad(const LinearModel& model, const std::vector<FeatureVector>& xs,
                     const std::vector<int>& labels, const std::vector<double>& sample_weights,
                     double l2_penalty, std::vector<double>& grad_weights,
                     std::vector<double>& grad_bias);

// Mini-batch gradient descent with linear warmup + linear decay, per-sample
// weights taken from class_weights[label] (uniform when class_weights is
// empty), and early stopping on dev macro-F1. Deterministic under cfg.seed.
std::pair<LinearModel, TrainReport> train(const std::vector<FeatureVector>& train_x,
                                          const std::vector<int>& train_y,
                                          const std::vector<FeatureVector>& dev_x,
                                          const std::vector<int>& dev_y,
                                          const std::vector<double>& class_weights,
                                          int num_classes, const TrainConfig& cfg);

// Numerically stable softmax probabilities; entries sum to 1.
std::vector<double> predict_scores(const LinearModel& model, const FeatureVector& x);

// Argmax of scores, ties broken by lowest class id.
int predict_label(const LinearModel& model, const FeatureVector& x);

// Versioned little-endian binary checkpoint carrying the featurizer
// fingerprint; load refuses a checkpoint whose fingerprint does not match.
void save_model(const LinearModel& model, const FeaturizerConfig& featurizer,
                const std::string& path);
LinearModel load_model(const std::string& path, const FeaturizerConfig& expected_featurizer);

}  // namespace fairbios
