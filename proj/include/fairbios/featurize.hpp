#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairbios/common.hpp"

namespace fairbios {

// Sparse hashed bag-of-ngrams vector. Indices strictly increasing, all < dim.
struct FeatureVector {
  uint32_t dim = 0;
  std::vector<std::pair<uint32_t, double>> entries;

  bool operator==(const FeatureVector&) const = default;
};

struct FeaturizerConfig {
  uint32_t dim = 1u << 18;  // power of two
  int ngram_max = 2;        // 1..3
  bool normalize = true;    // L2
  uint64_t hash_seed = 0;

  void validate() const;
  // Canonical string form, hashed into model checkpoints so a model is never
  // applied with a mismatched featurizer.
  std::string canonical() const;
  uint64_t fingerprint() const { return hash_bytes(canonical(), 0xFEA7); }
};

// Index of a word n-gram: seeded FNV-1a of the space-joined tokens, masked to
// dim. Stable across platforms and runs.
uint32_t hash_ngram(std::string_view joined, const FeaturizerConfig& cfg);

// `text` must already be normalize_text output. Empty text gives the zero
// vector.
FeatureVector featurize(std::string_view text, const FeaturizerConfig& cfg);

std::vector<FeatureVector> featurize_batch(const std::vector<std::string>& texts,
                                           const FeaturizerConfig& cfg);

// Sparse triplet dump (row,index,value) for external tools.
std::string feature_matrix_csv(const std::vector<FeatureVector>& rows);

}  // namespace fairbios
