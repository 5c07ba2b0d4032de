#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairbios/featurize.hpp"

using namespace fairbios;

TEST_CASE("config validation") {
  FeaturizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dim = 1000;  // not a power of two
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.dim = 1u << 10;
  cfg.ngram_max = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.ngram_max = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("fingerprint changes with any config field") {
  FeaturizerConfig a;
  FeaturizerConfig b = a;
  CHECK(a.fingerprint() == b.fingerprint());
  b.ngram_max = 3;
  CHECK(a.fingerprint() != b.fingerprint());
  b = a;
  b.hash_seed = 1;
  CHECK(a.fingerprint() != b.fingerprint());
  b = a;
  b.dim = 1u << 16;
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("unigram counts without normalization") {
  FeaturizerConfig cfg;
  cfg.dim = 1u << 12;
  cfg.ngram_max = 1;
  cfg.normalize = false;
  FeatureVector v = featurize("cat dog cat", cfg);
  REQUIRE(v.entries.size() == 2);
  double total = 0.0;
  for (const auto& [idx, val] : v.entries) {
    CHECK(idx < cfg.dim);
    total += val;
  }
  CHECK(total == doctest::Approx(3.0));

  // Indices strictly increasing.
  CHECK(v.entries[0].first < v.entries[1].first);

  CHECK(featurize("", cfg).entries.empty());
}

TEST_CASE("bigrams add one feature per adjacent pair") {
  FeaturizerConfig cfg;
  cfg.dim = 1u << 14;
  cfg.ngram_max = 2;
  cfg.normalize = false;
  FeatureVector v = featurize("a b c", cfg);
  // 3 unigrams + 2 bigrams, all distinct with overwhelming probability.
  double total = 0.0;
  for (const auto& [idx, val] : v.entries) total += val;
  CHECK(total == doctest::Approx(5.0));

  CHECK(hash_ngram("a b", cfg) != hash_ngram("b a", cfg));
}

TEST_CASE("L2 normalization gives unit vectors") {
  FeaturizerConfig cfg;
  cfg.ngram_max = 2;
  cfg.normalize = true;
  FeatureVector v = featurize("one two three four", cfg);
  double norm = 0.0;
  for (const auto& [idx, val] : v.entries) norm += val * val;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("featurization is deterministic and seed-sensitive") {
  FeaturizerConfig cfg;
  FeatureVector a = featurize("alpha beta gamma", cfg);
  FeatureVector b = featurize("alpha beta gamma", cfg);
  CHECK(a == b);

  FeaturizerConfig other = cfg;
  other.hash_seed = 123;
  CHECK_FALSE(a == featurize("alpha beta gamma", other));
}

TEST_CASE("batch featurization matches single calls") {
  FeaturizerConfig cfg;
  std::vector<std::string> texts = {"a b", "c d e", ""};
  auto batch = featurize_batch(texts, cfg);
  REQUIRE(batch.size() == 3);
  for (size_t i = 0; i < texts.size(); ++i) CHECK(batch[i] == featurize(texts[i], cfg));
}

TEST_CASE("sparse triplet dump") {
  FeaturizerConfig cfg;
  cfg.dim = 1u << 10;
  cfg.ngram_max = 1;
  cfg.normalize = false;
  auto rows = featurize_batch({"x", "y y"}, cfg);
  std::string csv = feature_matrix_csv(rows);
  CHECK(csv.rfind("row,index,value\n", 0) == 0);
  CHECK(csv.find("1,") != std::string::npos);
  CHECK(csv.find("2.000000000") != std::string::npos);
}
