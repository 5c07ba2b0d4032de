#include "fairbios/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace fairbios {

void FeaturizerConfig::validate() const {
  if (dim < 2 || (dim & (dim - 1)) != 0)
    throw_usage("BadFeaturizerConfig", "dim must be a power of two >= 2");
  if (ngram_max < 1 || ngram_max > 3)
    throw_usage("BadFeaturizerConfig", "ngram_max must be in {1,2,3}");
}

std::string FeaturizerConfig::canonical() const {
  std::ostringstream ss;
  ss << "dim=" << dim << ";ngram_max=" << ngram_max << ";normalize=" << (normalize ? 1 : 0)
     << ";hash_seed=" << hash_seed;
  return ss.str();
}

uint32_t hash_ngram(std::string_view joined, const FeaturizerConfig& cfg) {
  return static_cast<uint32_t>(hash_bytes(joined, cfg.hash_seed) & (cfg.dim - 1));
}

FeatureVector featurize(std::string_view text, const FeaturizerConfig& cfg) {
  cfg.validate();
  FeatureVector fv;
  fv.dim = cfg.dim;
  if (text.empty()) return fv;

  // Token boundaries; text is already single-space normalized.
  std::vector<std::pair<size_t, size_t>> tokens;  // (begin, end)
  size_t begin = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ' ') {
      if (i > begin) tokens.emplace_back(begin, i);
      begin = i + 1;
    }
  }

  std::map<uint32_t, double> counts;
  for (size_t i = 0; i < tokens.size(); ++i) {
    for (int n = 1; n <= cfg.ngram_max; ++n) {
      if (i + static_cast<size_t>(n) > tokens.size()) break;
      // The n-gram is the contiguous slice from token i's begin to token
      // (i+n-1)'s end; interior separators are single spaces already.
      std::string_view joined =
          text.substr(tokens[i].first, tokens[i + static_cast<size_t>(n) - 1].second - tokens[i].first);
      counts[hash_ngram(joined, cfg)] += 1.0;
    }
  }

  fv.entries.assign(counts.begin(), counts.end());
  if (cfg.normalize && !fv.entries.empty()) {
    double sq = 0.0;
    for (const auto& [idx, v] : fv.entries) sq += v * v;
    double inv = 1.0 / std::sqrt(sq);
    for (auto& [idx, v] : fv.entries) v *= inv;
  }
  return fv;
}

std::vector<FeatureVector> featurize_batch(const std::vector<std::string>& texts,
                                           const FeaturizerConfig& cfg) {
  std::vector<FeatureVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(featurize(t, cfg));
  return out;
}

std::string feature_matrix_csv(const std::vector<FeatureVector>& rows) {
  std::ostringstream ss;
  ss << "row,index,value\n";
  for (size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [idx, v] : rows[r].entries) {
      ss << r << ',' << idx << ',' << format_fixed(v, 9) << '\n';
    }
  }
  return ss.str();
}

}  // namespace fairbios
