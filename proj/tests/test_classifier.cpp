#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "fairbios/classifier.hpp"
#include "fairbios/fairmetrics.hpp"

using namespace fairbios;

namespace {

FeatureVector random_sparse(Rng& rng, uint32_t dim, int max_nnz) {
  FeatureVector v;
  v.dim = dim;
  int nnz = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(max_nnz)));
  std::vector<uint32_t> idx;
  for (int i = 0; i < nnz; ++i) idx.push_back(static_cast<uint32_t>(rng.next_below(dim)));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (uint32_t j : idx) v.entries.emplace_back(j, rng.next_double() * 2.0 - 1.0);
  return v;
}

double loss_only(const LinearModel& model, const std::vector<FeatureVector>& xs,
                 const std::vector<int>& labels, const std::vector<double>& weights, double l2) {
  std::vector<double> gw, gb;
  return loss_and_grad(model, xs, labels, weights, l2, gw, gb);
}

}  // namespace

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(11);
  const uint32_t dim = 24;
  // Step and floor sized so central-difference rounding noise (~1e-11 at this
  // loss scale) stays well below the tolerance even when sample contributions
  // nearly cancel in a gradient coordinate.
  const double eps = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    int k = 2 + static_cast<int>(rng.next_below(3));
    LinearModel model = LinearModel::zeros(k, dim);
    for (double& w : model.weights) w = rng.next_double() - 0.5;
    for (double& b : model.bias) b = rng.next_double() - 0.5;

    size_t n = 2 + rng.next_below(6);
    std::vector<FeatureVector> xs;
    std::vector<int> labels;
    std::vector<double> weights;
    for (size_t i = 0; i < n; ++i) {
      xs.push_back(random_sparse(rng, dim, 6));
      labels.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(k))));
      weights.push_back(0.25 + rng.next_double());
    }
    double l2 = rng.next_double() * 1e-3;

    std::vector<double> gw, gb;
    loss_and_grad(model, xs, labels, weights, l2, gw, gb);

    auto check_coord = [&](double* coord, double analytic) {
      double saved = *coord;
      *coord = saved + eps;
      double up = loss_only(model, xs, labels, weights, l2);
      *coord = saved - eps;
      double down = loss_only(model, xs, labels, weights, l2);
      *coord = saved;
      double numeric = (up - down) / (2.0 * eps);
      double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
      CHECK(std::abs(analytic - numeric) / denom <= 1e-5);
    };

    for (int c = 0; c < k; ++c) check_coord(&model.bias[size_t(c)], gb[size_t(c)]);
    for (int probe = 0; probe < 10; ++probe) {
      size_t j = rng.next_below(model.weights.size());
      check_coord(&model.weights[j], gw[j]);
    }
    // Also probe coordinates touched by the data.
    for (const auto& [j, v] : xs[0].entries) {
      for (int c = 0; c < k; ++c) {
        size_t flat = size_t(c) * dim + j;
        check_coord(&model.weights[flat], gw[flat]);
      }
    }
  }
}

TEST_CASE("loss_and_grad input validation") {
  LinearModel model = LinearModel::zeros(2, 8);
  FeatureVector x;
  x.dim = 8;
  x.entries = {{1, 1.0}};
  std::vector<double> gw, gb;
  CHECK_THROWS_AS(loss_and_grad(model, {x}, {0, 1}, {}, 0.0, gw, gb), Error);
  CHECK_THROWS_AS(loss_and_grad(model, {x}, {5}, {}, 0.0, gw, gb), Error);
  CHECK_THROWS_AS(loss_and_grad(model, {x}, {0}, {-1.0}, 0.0, gw, gb), Error);
  FeatureVector wrong;
  wrong.dim = 16;
  CHECK_THROWS_AS(loss_and_grad(model, {wrong}, {0}, {}, 0.0, gw, gb), Error);
}

TEST_CASE("training separates a linearly separable problem") {
  Rng rng(21);
  const uint32_t dim = 64;
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 400; ++i) {
    int label = static_cast<int>(rng.next_below(2));
    FeatureVector v;
    v.dim = dim;
    uint32_t base = label == 0 ? 0 : 32;
    uint32_t a = base + static_cast<uint32_t>(rng.next_below(16));
    uint32_t b = base + 16 + static_cast<uint32_t>(rng.next_below(16));
    v.entries = {{a, 1.0}, {b, 1.0}};
    xs.push_back(v);
    ys.push_back(label);
  }
  std::vector<FeatureVector> train_x(xs.begin(), xs.begin() + 300);
  std::vector<int> train_y(ys.begin(), ys.begin() + 300);
  std::vector<FeatureVector> dev_x(xs.begin() + 300, xs.end());
  std::vector<int> dev_y(ys.begin() + 300, ys.end());

  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.seed = 1;
  auto [model, report] = train(train_x, train_y, dev_x, dev_y, {}, 2, cfg);
  size_t hits = 0;
  for (size_t i = 0; i < dev_x.size(); ++i)
    if (predict_label(model, dev_x[i]) == dev_y[i]) ++hits;
  CHECK(double(hits) / double(dev_x.size()) > 0.95);
  CHECK(report.epochs.size() <= size_t(cfg.max_epochs));
  CHECK(report.best_epoch < int(report.epochs.size()));

  auto scores = predict_scores(model, dev_x[0]);
  double sum = 0.0;
  for (double s : scores) sum += s;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("training is deterministic under the seed") {
  Rng rng(31);
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  for (int i = 0; i < 100; ++i) {
    FeatureVector v;
    v.dim = 32;
    v.entries = {{static_cast<uint32_t>(rng.next_below(32)), 1.0}};
    std::sort(v.entries.begin(), v.entries.end());
    xs.push_back(v);
    ys.push_back(static_cast<int>(rng.next_below(3)));
  }
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.seed = 9;
  auto [m1, r1] = train(xs, ys, xs, ys, {}, 3, cfg);
  auto [m2, r2] = train(xs, ys, xs, ys, {}, 3, cfg);
  CHECK(m1.weights == m2.weights);
  CHECK(m1.bias == m2.bias);
  CHECK(r1.best_epoch == r2.best_epoch);
}

TEST_CASE("class weights shift decisions toward the upweighted class") {
  // Identical features, 90/10 labels: uniform weights predict the majority,
  // inverse-frequency weights balance the loss so the boundary moves.
  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  FeatureVector v;
  v.dim = 8;
  v.entries = {{0, 1.0}};
  for (int i = 0; i < 100; ++i) {
    xs.push_back(v);
    ys.push_back(i < 90 ? 0 : 1);
  }
  TrainConfig cfg;
  cfg.max_epochs = 4;
  cfg.seed = 2;
  auto [uniform_model, r1] = train(xs, ys, xs, ys, {}, 2, cfg);
  CHECK(predict_label(uniform_model, v) == 0);

  std::vector<double> weights = {100.0 / (2.0 * 90.0), 100.0 / (2.0 * 10.0)};
  auto [weighted_model, r2] = train(xs, ys, xs, ys, weights, 2, cfg);
  auto s_uniform = predict_scores(uniform_model, v);
  auto s_weighted = predict_scores(weighted_model, v);
  CHECK(s_weighted[1] > s_uniform[1]);
}

TEST_CASE("checkpoint round trip and featurizer mismatch") {
  LinearModel model = LinearModel::zeros(3, 16);
  Rng rng(41);
  for (double& w : model.weights) w = rng.next_double();
  for (double& b : model.bias) b = rng.next_double();

  FeaturizerConfig feat;
  feat.dim = 16;
  std::string path =
      (std::filesystem::temp_directory_path() / "fb_model_roundtrip.bin").string();
  save_model(model, feat, path);
  LinearModel loaded = load_model(path, feat);
  CHECK(loaded.weights == model.weights);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.num_classes == 3);

  FeaturizerConfig other = feat;
  other.hash_seed = 77;
  CHECK_THROWS_WITH_AS(load_model(path, other), doctest::Contains("FeaturizerMismatch"), Error);
  std::remove(path.c_str());
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = TrainConfig{};
  cfg.warmup_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
