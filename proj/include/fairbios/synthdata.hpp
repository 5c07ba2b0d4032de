#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairbios/corpus.hpp"

namespace fairbios {

struct SynthConfig {
  size_t n = 0;
  int num_professions = 8;
  double gender_skew = 0.62;  // male fraction
  double profession_gender_bias = 0.9;
  int signal_words_per_profession = 20;
  double gendered_word_rate = 0.2;
  int bio_length = 40;
  uint64_t seed = 0;

  void validate() const;  // throws BadConfig
  std::string to_json() const;
  static SynthConfig from_json(const std::string& json);
};

struct SynthCorpus {
  std::vector<RawRecord> records;
  std::vector<std::string> profession_names;  // lexicographic, index = label id
  std::vector<int> majority_gender;           // 0 = female, 1 = male, per profession
};

// Deterministic under cfg.seed (bitwise-identical corpus). Gender is drawn
// first (Bernoulli on the male fraction), the profession honors its assigned
// majority gender with probability profession_gender_bias, and the bio mixes
// profession signal words, gender-correlated words (at gendered_word_rate)
// and neutral filler. All vocabulary is lowercase alphabetic so it survives
// text normalization unchanged.
SynthCorpus generate(const SynthConfig& cfg);

// Same CSV schema the corpus loader expects (bio,gender,profession).
std::string synth_csv(const SynthCorpus& corpus);

// Ground-truth generation parameters for the JSON sidecar.
std::string synth_sidecar_json(const SynthConfig& cfg, const SynthCorpus& corpus);

}  // namespace fairbios
