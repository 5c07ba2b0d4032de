#include "fairbios/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace fairbios {

namespace {

// Vocabulary shape. Gendered tokens come from two leaning pools: men draw
// masc words with probability kMascGivenMale, women with kMascGivenFemale.
// Individual tokens are only probabilistic evidence, so each bio carries a
// graded gender log-odds; that overlap is what lets rebalancing and
// threshold moves actually shift per-group recall.
constexpr int kGenderedPoolSize = 10;
constexpr double kMascGivenMale = 0.68;
constexpr double kMascGivenFemale = 0.32;
constexpr double kSignalRate = 0.30;  // profession signal share of non-gendered tokens
constexpr int kFillerPoolSize = 200;
constexpr double kPopularityDecay = 0.85;  // profession p has weight decay^p

// Two lowercase letters, supports 676 distinct suffixes.
std::string letter_suffix(int i) {
  std::string s(2, 'a');
  s[0] = static_cast<char>('a' + (i / 26) % 26);
  s[1] = static_cast<char>('a' + i % 26);
  return s;
}

int weighted_pick(Rng& rng, const std::vector<std::pair<int, double>>& items, double total) {
  double u = rng.next_double() * total;
  double acc = 0.0;
  for (const auto& [idx, w] : items) {
    acc += w;
    if (u < acc) return idx;
  }
  return items.back().first;
}

}  // namespace

void SynthConfig::validate() const {
  auto bad = [](const std::string& msg) { throw_usage("BadConfig", msg); };
  if (num_professions < 1 || num_professions > 676) bad("num_professions out of range");
  if (n < static_cast<size_t>(num_professions) * 10) bad("n must be >= 10 * num_professions");
  if (!(gender_skew > 0.0 && gender_skew < 1.0)) bad("gender_skew must be in (0,1)");
  if (!(profession_gender_bias >= 0.0 && profession_gender_bias <= 1.0))
    bad("profession_gender_bias must be in [0,1]");
  if (signal_words_per_profession < 1) bad("signal_words_per_profession must be >= 1");
  if (!(gendered_word_rate >= 0.0 && gendered_word_rate <= 1.0))
    bad("gendered_word_rate must be in [0,1]");
  if (bio_length < 1) bad("bio_length must be >= 1");
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();

  SynthCorpus out;
  out.profession_names.reserve(static_cast<size_t>(cfg.num_professions));
  out.majority_gender.reserve(static_cast<size_t>(cfg.num_professions));
  for (int p = 0; p < cfg.num_professions; ++p) {
    out.profession_names.push_back("prof" + letter_suffix(p));
    out.majority_gender.push_back(p % 2 == 0 ? 1 : 0);
  }

  std::vector<std::vector<std::string>> signal_words(static_cast<size_t>(cfg.num_professions));
  for (int p = 0; p < cfg.num_professions; ++p)
    for (int k = 0; k < cfg.signal_words_per_profession; ++k)
      signal_words[static_cast<size_t>(p)].push_back(out.profession_names[static_cast<size_t>(p)] +
                                                     "sig" + letter_suffix(k));

  std::vector<std::string> masc_words, femi_words, filler_words;
  for (int i = 0; i < kGenderedPoolSize; ++i) {
    masc_words.push_back("masc" + letter_suffix(i));
    femi_words.push_back("femi" + letter_suffix(i));
  }
  for (int i = 0; i < kFillerPoolSize; ++i) filler_words.push_back("fill" + letter_suffix(i));

  // Popularity-weighted profession buckets, one per majority gender.
  std::vector<std::pair<int, double>> bucket[2];
  double bucket_total[2] = {0.0, 0.0};
  for (int p = 0; p < cfg.num_professions; ++p) {
    double w = std::pow(kPopularityDecay, p);
    int g = out.majority_gender[static_cast<size_t>(p)];
    bucket[g].emplace_back(p, w);
    bucket_total[g] += w;
  }

  Rng rng(derive_seed(cfg.seed, "synth"));
  out.records.reserve(cfg.n);
  for (size_t i = 0; i < cfg.n; ++i) {
    int gender = rng.next_double() < cfg.gender_skew ? 1 : 0;
    int wanted = rng.next_double() < cfg.profession_gender_bias ? gender : 1 - gender;
    if (bucket[wanted].empty()) wanted = 1 - wanted;
    int profession = weighted_pick(rng, bucket[wanted], bucket_total[wanted]);

    std::string bio;
    bio.reserve(static_cast<size_t>(cfg.bio_length) * 10);
    for (int t = 0; t < cfg.bio_length; ++t) {
      const std::string* word;
      if (rng.next_double() < cfg.gendered_word_rate) {
        double masc_rate = gender == 1 ? kMascGivenMale : kMascGivenFemale;
        const auto& pool = rng.next_double() < masc_rate ? masc_words : femi_words;
        word = &pool[rng.next_below(pool.size())];
      } else if (rng.next_double() < kSignalRate) {
        const auto& pool = signal_words[static_cast<size_t>(profession)];
        word = &pool[rng.next_below(pool.size())];
      } else {
        word = &filler_words[rng.next_below(filler_words.size())];
      }
      if (t > 0) bio += ' ';
      bio += *word;
    }

    RawRecord rec;
    rec.bio = std::move(bio);
    rec.gender = gender == 1 ? "male" : "female";
    rec.profession = out.profession_names[static_cast<size_t>(profession)];
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string synth_csv(const SynthCorpus& corpus) {
  std::string out = "bio,gender,profession\n";
  for (const RawRecord& r : corpus.records) {
    out += r.bio;
    out += ',';
    out += r.gender;
    out += ',';
    out += r.profession;
    out += '\n';
  }
  return out;
}

std::string synth_sidecar_json(const SynthConfig& cfg, const SynthCorpus& corpus) {
  size_t males = 0;
  std::vector<size_t> per_profession(corpus.profession_names.size(), 0);
  std::vector<size_t> per_profession_male(corpus.profession_names.size(), 0);
  for (const RawRecord& r : corpus.records) {
    bool male = r.gender == "male";
    if (male) ++males;
    for (size_t p = 0; p < corpus.profession_names.size(); ++p) {
      if (r.profession == corpus.profession_names[p]) {
        per_profession[p]++;
        if (male) per_profession_male[p]++;
        break;
      }
    }
  }
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(cfg.to_json());
  nlohmann::json profs = nlohmann::json::array();
  for (size_t p = 0; p < corpus.profession_names.size(); ++p) {
    profs.push_back({{"name", corpus.profession_names[p]},
                     {"majority_gender", corpus.majority_gender[p] == 1 ? "male" : "female"},
                     {"count", per_profession[p]},
                     {"male_count", per_profession_male[p]}});
  }
  j["professions"] = profs;
  j["n"] = corpus.records.size();
  j["male_fraction"] =
      corpus.records.empty() ? 0.0
                             : static_cast<double>(males) / static_cast<double>(corpus.records.size());
  return j.dump(2);
}

std::string SynthConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["num_professions"] = num_professions;
  j["gender_skew"] = gender_skew;
  j["profession_gender_bias"] = profession_gender_bias;
  j["signal_words_per_profession"] = signal_words_per_profession;
  j["gendered_word_rate"] = gendered_word_rate;
  j["bio_length"] = bio_length;
  j["seed"] = seed;
  return j.dump(2);
}

SynthConfig SynthConfig::from_json(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw_usage("BadConfig", "cannot parse synth config");
  SynthConfig cfg;
  try {
    cfg.n = j.at("n").get<size_t>();
    cfg.num_professions = j.value("num_professions", cfg.num_professions);
    cfg.gender_skew = j.value("gender_skew", cfg.gender_skew);
    cfg.profession_gender_bias = j.value("profession_gender_bias", cfg.profession_gender_bias);
    cfg.signal_words_per_profession =
        j.value("signal_words_per_profession", cfg.signal_words_per_profession);
    cfg.gendered_word_rate = j.value("gendered_word_rate", cfg.gendered_word_rate);
    cfg.bio_length = j.value("bio_length", cfg.bio_length);
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw_usage("BadConfig", e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace fairbios
