#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairbios/common.hpp"

namespace fairbios {

// One row as it appears in the input file, after dropping incomplete rows.
struct RawRecord {
  std::string bio;
  std::string gender;
  std::string profession;
};

// One biography after normalization and label encoding.
struct Record {
  std::string text;  // lowercase alphabetic words, single-space separated
  int gender_id = 0;
  int profession_id = 0;
};

// Bijective dense label <-> id mapping; ids follow lexicographic name order.
struct LabelMap {
  std::vector<std::string> id_to_name;
  std::unordered_map<std::string, int> name_to_id;

  int size() const { return static_cast<int>(id_to_name.size()); }
  int id_of(const std::string& name) const;
  const std::string& name_of(int id) const;

  static LabelMap from_names(std::vector<std::string> names);
};

struct CorpusSchema {
  std::string bio = "bio";
  std::string gender = "gender";
  std::string profession = "profession";
};

struct LoadStats {
  size_t total_rows = 0;      // data rows seen (excluding header)
  size_t kept = 0;
  size_t dropped_empty = 0;   // missing/empty bio, gender, or profession
  size_t malformed = 0;
  std::vector<size_t> malformed_lines;  // 1-based line numbers
};

// Loads a CSV (RFC-4180, header row required) or line-delimited JSON corpus.
// Format is picked by extension: ".json"/".jsonl"/".ndjson" -> JSONL, else CSV.
// Header names are lowercased and whitespace-stripped before schema matching.
std::vector<RawRecord> load_corpus(const std::string& path, const CorpusSchema& schema = {},
                                   LoadStats* stats = nullptr);

// Lowercase, map every non-[a-z] character to a space, collapse space runs,
// trim. Total and idempotent.
std::string normalize_text(std::string_view raw);

// Builds (gender, profession) maps with lexicographically assigned ids.
// The gender map must end up with exactly two entries.
std::pair<LabelMap, LabelMap> build_label_maps(const std::vector<RawRecord>& records);

// Normalizes text and encodes labels through the given maps.
std::vector<Record> encode_records(const std::vector<RawRecord>& raw, const LabelMap& gender_map,
                                   const LabelMap& profession_map);

struct SplitSet {
  std::vector<Record> train;
  std::vector<Record> dev;
  std::vector<Record> test;
  uint64_t seed = 0;
};

// Seeded uniform shuffle followed by contiguous slicing; no stratification.
SplitSet split_dataset(const std::vector<Record>& records, std::array<double, 3> ratios,
                       uint64_t seed);

struct SplitDistribution {
  size_t total = 0;
  std::vector<size_t> gender_counts;        // indexed by gender id
  std::vector<double> gender_percent;       // sums to 100 when total > 0
  std::vector<size_t> profession_counts;    // indexed by profession id
};

struct DistributionStats {
  // Order: train, dev, test.
  std::array<SplitDistribution, 3> splits;
  // Fraction of gender id 0 per profession over the whole dataset; -1 when a
  // profession has no records.
  std::vector<double> profession_gender_ratio;
};

DistributionStats compute_distribution_stats(const SplitSet& splits, int num_genders,
                                             int num_professions);

}  // namespace fairbios
