#include "fairbios/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "fairbios/fairmetrics.hpp"

namespace fairbios {

namespace {

void check_vector(const FeatureVector& x, uint32_t dim) {
  if (x.dim != dim)
    throw_data("DimensionMismatch", "feature dim " + std::to_string(x.dim) +
                                        " != model dim " + std::to_string(dim));
}

// logits for one sample
void compute_logits(const LinearModel& m, const FeatureVector& x, std::vector<double>& logits) {
  logits.assign(static_cast<size_t>(m.num_classes), 0.0);
  for (int k = 0; k < m.num_classes; ++k) {
    const double* row = m.weights.data() + static_cast<size_t>(k) * m.dim;
    double acc = m.bias[static_cast<size_t>(k)];
    for (const auto& [idx, v] : x.entries) acc += row[idx] * v;
    logits[static_cast<size_t>(k)] = acc;
  }
}

void softmax_inplace(std::vector<double>& v) {
  double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& e : v) {
    e = std::exp(e - mx);
    sum += e;
  }
  for (double& e : v) e /= sum;
}

}  // namespace

LinearModel LinearModel::zeros(int num_classes, uint32_t dim) {
  LinearModel m;
  m.num_classes = num_classes;
  m.dim = dim;
  m.weights.assign(static_cast<size_t>(num_classes) * dim, 0.0);
  m.bias.assign(static_cast<size_t>(num_classes), 0.0);
  return m;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw_usage("BadTrainConfig", "learning_rate must be > 0");
  if (batch_size < 1) throw_usage("BadTrainConfig", "batch_size must be >= 1");
  if (max_epochs < 1) throw_usage("BadTrainConfig", "max_epochs must be >= 1");
  if (warmup_fraction < 0 || warmup_fraction > 1)
    throw_usage("BadTrainConfig", "warmup_fraction must be in [0,1]");
  if (early_stop_patience < 1) throw_usage("BadTrainConfig", "early_stop_patience must be >= 1");
  if (l2_penalty < 0) throw_usage("BadTrainConfig", "l2_penalty must be >= 0");
}

double loss_and_grad(const LinearModel& model, const std::vector<FeatureVector>& xs,
                     const std::vector<int>& labels, const std::vector<double>& sample_weights,
                     double l2_penalty, std::vector<double>& grad_weights,
                     std::vector<double>& grad_bias) {
  if (xs.empty() || xs.size() != labels.size() || xs.size() != sample_weights.size())
    throw_data("LengthMismatch", "loss_and_grad: batch arrays must be equal non-zero length");
  grad_weights.assign(model.weights.size(), 0.0);
  grad_bias.assign(model.bias.size(), 0.0);

  double weight_sum = 0.0;
  for (double w : sample_weights) {
    if (!(w > 0)) throw_data("BadSampleWeight", "sample weights must be > 0");
    weight_sum += w;
  }

  double loss = 0.0;
  std::vector<double> probs;
  for (size_t i = 0; i < xs.size(); ++i) {
    check_vector(xs[i], model.dim);
    int y = labels[i];
    if (y < 0 || y >= model.num_classes)
      throw_data("LabelOutOfRange", "label " + std::to_string(y));
    compute_logits(model, xs[i], probs);
    softmax_inplace(probs);
    double p = std::max(probs[static_cast<size_t>(y)], 1e-300);
    loss += sample_weights[i] * -std::log(p);
    for (int k = 0; k < model.num_classes; ++k) {
      double d = sample_weights[i] * (probs[static_cast<size_t>(k)] - (k == y ? 1.0 : 0.0)) /
                 weight_sum;
      grad_bias[static_cast<size_t>(k)] += d;
      double* grow = grad_weights.data() + static_cast<size_t>(k) * model.dim;
      for (const auto& [idx, v] : xs[i].entries) grow[idx] += d * v;
    }
  }
  loss /= weight_sum;

  if (l2_penalty > 0) {
    double sq = 0.0;
    for (size_t j = 0; j < model.weights.size(); ++j) {
      sq += model.weights[j] * model.weights[j];
      grad_weights[j] += 2.0 * l2_penalty * model.weights[j];
    }
    loss += l2_penalty * sq;
  }
  return loss;
}

std::pair<LinearModel, TrainReport> train(const std::vector<FeatureVector>& train_x,
                                          const std::vector<int>& train_y,
                                          const std::vector<FeatureVector>& dev_x,
                                          const std::vector<int>& dev_y,
                                          const std::vector<double>& class_weights,
                                          int num_classes, const TrainConfig& cfg) {
  cfg.validate();
  if (train_x.empty() || dev_x.empty()) throw_data("EmptyData", "train and dev must be non-empty");
  if (train_x.size() != train_y.size() || dev_x.size() != dev_y.size())
    throw_data("LengthMismatch", "features and labels must align");
  if (!class_weights.empty()) {
    if (static_cast<int>(class_weights.size()) != num_classes)
      throw_data("LengthMismatch", "class_weights must have num_classes entries");
    for (double w : class_weights)
      if (!(w > 0)) throw_data("BadClassWeight", "class weights must be > 0");
  }
  for (int y : train_y)
    if (y < 0 || y >= num_classes) throw_data("LabelOutOfRange", "train label " + std::to_string(y));

  uint32_t dim = train_x[0].dim;
  size_t n = train_x.size();
  size_t batches_per_epoch = (n + static_cast<size_t>(cfg.batch_size) - 1) /
                             static_cast<size_t>(cfg.batch_size);
  size_t total_steps = batches_per_epoch * static_cast<size_t>(cfg.max_epochs);
  size_t warmup_steps =
      static_cast<size_t>(std::llround(cfg.warmup_fraction * static_cast<double>(total_steps)));

  auto lr_at = [&](size_t step) {
    if (warmup_steps > 0 && step < warmup_steps)
      return cfg.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
    if (total_steps == warmup_steps) return cfg.learning_rate;
    return cfg.learning_rate * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - warmup_steps);
  };

  // Weights are stored as scale * v so the L2 decay is O(1) per batch.
  LinearModel model = LinearModel::zeros(num_classes, dim);
  double scale = 1.0;
  auto materialize = [&]() {
    if (scale != 1.0) {
      for (double& w : model.weights) w *= scale;
      scale = 1.0;
    }
  };

  TrainReport report;
  LinearModel best_model = model;
  double best_f1 = -1.0;
  size_t step = 0;

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<double> probs;
  std::vector<double> dlogit(static_cast<size_t>(num_classes));

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    deterministic_shuffle(order, derive_seed(cfg.seed, "epoch/" + std::to_string(epoch)));

    double epoch_loss = 0.0;
    for (size_t b = 0; b < batches_per_epoch; ++b, ++step) {
      size_t lo = b * static_cast<size_t>(cfg.batch_size);
      size_t hi = std::min(n, lo + static_cast<size_t>(cfg.batch_size));
      double lr = lr_at(step);

      double weight_sum = 0.0;
      for (size_t i = lo; i < hi; ++i)
        weight_sum += class_weights.empty() ? 1.0
                                            : class_weights[static_cast<size_t>(train_y[order[i]])];

      // Forward pass for the whole batch at the current weights, then one
      // gradient step: w <- w*(1 - lr*2*l2) - lr*grad_data.
      double batch_loss = 0.0;
      size_t batch_n = hi - lo;
      std::vector<std::vector<double>> dlogits(batch_n);
      for (size_t i = lo; i < hi; ++i) {
        const FeatureVector& x = train_x[order[i]];
        check_vector(x, dim);
        int y = train_y[order[i]];
        double w = class_weights.empty() ? 1.0 : class_weights[static_cast<size_t>(y)];

        probs.assign(static_cast<size_t>(num_classes), 0.0);
        for (int k = 0; k < num_classes; ++k) {
          const double* row = model.weights.data() + static_cast<size_t>(k) * dim;
          double acc = model.bias[static_cast<size_t>(k)];
          for (const auto& [idx, v] : x.entries) acc += scale * row[idx] * v;
          probs[static_cast<size_t>(k)] = acc;
        }
        softmax_inplace(probs);
        batch_loss += w * -std::log(std::max(probs[static_cast<size_t>(y)], 1e-300));

        dlogit.assign(static_cast<size_t>(num_classes), 0.0);
        for (int k = 0; k < num_classes; ++k)
          dlogit[static_cast<size_t>(k)] =
              w * (probs[static_cast<size_t>(k)] - (k == y ? 1.0 : 0.0)) / weight_sum;
        dlogits[i - lo] = dlogit;
      }
      if (cfg.l2_penalty > 0) {
        scale *= 1.0 - lr * 2.0 * cfg.l2_penalty;
        if (scale < 1e-12) materialize();
      }
      for (size_t i = lo; i < hi; ++i) {
        const FeatureVector& x = train_x[order[i]];
        const std::vector<double>& d = dlogits[i - lo];
        for (int k = 0; k < num_classes; ++k) {
          model.bias[static_cast<size_t>(k)] -= lr * d[static_cast<size_t>(k)];
          double* row = model.weights.data() + static_cast<size_t>(k) * dim;
          double upd = lr * d[static_cast<size_t>(k)] / scale;
          for (const auto& [idx, v] : x.entries) row[idx] -= upd * v;
        }
      }
      batch_loss /= weight_sum;
      if (!std::isfinite(batch_loss))
        throw_numeric("NonFiniteLoss", "epoch " + std::to_string(epoch) + " step " +
                                           std::to_string(step) + ": loss is not finite");
      epoch_loss += batch_loss;
    }

    materialize();
    for (double w : model.bias)
      if (!std::isfinite(w)) throw_numeric("NonFiniteLoss", "non-finite bias after epoch");

    // dev macro-F1 for early stopping
    std::vector<int> dev_pred(dev_x.size());
    for (size_t i = 0; i < dev_x.size(); ++i) dev_pred[i] = predict_label(model, dev_x[i]);
    double f1 = macro_f1(dev_y, dev_pred, num_classes);

    report.epochs.push_back({epoch_loss / static_cast<double>(batches_per_epoch), f1});
    if (f1 > best_f1) {
      best_f1 = f1;
      report.best_epoch = epoch;
      best_model = model;
    }
    if (epoch - report.best_epoch >= cfg.early_stop_patience) {
      report.stopped_early = true;
      break;
    }
  }

  return {std::move(best_model), std::move(report)};
}

std::vector<double> predict_scores(const LinearModel& model, const FeatureVector& x) {
  check_vector(x, model.dim);
  std::vector<double> probs;
  compute_logits(model, x, probs);
  softmax_inplace(probs);
  return probs;
}

int predict_label(const LinearModel& model, const FeatureVector& x) {
  check_vector(x, model.dim);
  std::vector<double> logits;
  compute_logits(model, x, logits);
  int best = 0;
  for (int k = 1; k < model.num_classes; ++k)
    if (logits[static_cast<size_t>(k)] > logits[static_cast<size_t>(best)]) best = k;
  return best;
}

namespace {
constexpr char kMagic[8] = {'F', 'B', 'M', 'O', 'D', 'E', 'L', '1'};
}

void save_model(const LinearModel& model, const FeaturizerConfig& featurizer,
                const std::string& path) {
  std::string buf;
  buf.reserve(64 + model.weights.size() * sizeof(double));
  auto put = [&](const void* p, size_t nbytes) {
    buf.append(reinterpret_cast<const char*>(p), nbytes);
  };
  put(kMagic, sizeof(kMagic));
  uint64_t fp = featurizer.fingerprint();
  int64_t k = model.num_classes;
  uint64_t d = model.dim;
  put(&fp, 8);
  put(&k, 8);
  put(&d, 8);
  put(model.weights.data(), model.weights.size() * sizeof(double));
  put(model.bias.data(), model.bias.size() * sizeof(double));
  atomic_write_file(path, buf);
}

LinearModel load_model(const std::string& path, const FeaturizerConfig& expected_featurizer) {
  std::string buf = read_file(path);
  size_t off = 0;
  auto get = [&](void* p, size_t nbytes) {
    if (off + nbytes > buf.size()) throw_data("BadCheckpoint", path + ": truncated");
    std::memcpy(p, buf.data() + off, nbytes);
    off += nbytes;
  };
  char magic[8];
  get(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw_data("BadCheckpoint", path + ": bad magic");
  uint64_t fp = 0, d = 0;
  int64_t k = 0;
  get(&fp, 8);
  get(&k, 8);
  get(&d, 8);
  if (fp != expected_featurizer.fingerprint())
    throw_data("FeaturizerMismatch", path + ": checkpoint featurizer fingerprint differs");
  if (k <= 0 || d < 2) throw_data("BadCheckpoint", path + ": bad shape");
  LinearModel m = LinearModel::zeros(static_cast<int>(k), static_cast<uint32_t>(d));
  get(m.weights.data(), m.weights.size() * sizeof(double));
  get(m.bias.data(), m.bias.size() * sizeof(double));
  if (off != buf.size()) throw_data("BadCheckpoint", path + ": trailing bytes");
  return m;
}

}  // namespace fairbios
