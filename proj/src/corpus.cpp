#include "fairbios/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace fairbios {

namespace {

std::string strip_lower(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

// RFC-4180 reader. Returns false at EOF; throws CsvQuoteError on a stray
// quote, which the caller reports as a malformed row.
struct CsvReader {
  std::istream& in;
  size_t line = 0;  // 1-based line number of the last row's first line

  struct QuoteError {};

  bool next_row(std::vector<std::string>& fields, size_t& row_line) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    ++line;
    row_line = line;
    std::string field;
    bool in_quotes = false;
    bool row_done = false;
    bool quoted_field = false;
    while (!row_done) {
      if (c == EOF) {
        if (in_quotes) throw QuoteError{};
        break;
      }
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          int peek = in.peek();
          if (peek == '"') {
            field += '"';
            in.get();
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line;
          field += ch;
        }
      } else {
        switch (ch) {
          case '"':
            if (!field.empty() || quoted_field) throw QuoteError{};
            in_quotes = true;
            quoted_field = true;
            break;
          case ',':
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
            break;
          case '\r':
            if (in.peek() == '\n') break;  // swallow, handled by '\n'
            [[fallthrough]];
          case '\n':
            row_done = true;
            break;
          default:
            if (quoted_field) throw QuoteError{};  // text after closing quote
            field += ch;
        }
      }
      if (!row_done) c = in.get();
    }
    fields.push_back(std::move(field));
    return true;
  }
};

std::vector<RawRecord> load_csv(std::istream& in, const std::string& path,
                                const CorpusSchema& schema, LoadStats& stats) {
  CsvReader reader{in};
  std::vector<std::string> header;
  size_t row_line = 0;
  try {
    if (!reader.next_row(header, row_line))
      throw_data("SchemaMismatch", path + ": empty file, no header row");
  } catch (const CsvReader::QuoteError&) {
    throw_data("SchemaMismatch", path + ": malformed header row");
  }

  int bio_col = -1, gender_col = -1, prof_col = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    std::string name = strip_lower(header[i]);
    if (name == schema.bio) bio_col = static_cast<int>(i);
    else if (name == schema.gender) gender_col = static_cast<int>(i);
    else if (name == schema.profession) prof_col = static_cast<int>(i);
  }
  if (bio_col < 0 || gender_col < 0 || prof_col < 0) {
    throw_data("SchemaMismatch", path + ": required columns '" + schema.bio + "', '" +
                                     schema.gender + "', '" + schema.profession +
                                     "' not all present after header normalization");
  }
  size_t min_cols =
      static_cast<size_t>(std::max({bio_col, gender_col, prof_col})) + 1;

  std::vector<RawRecord> out;
  std::vector<std::string> fields;
  for (;;) {
    try {
      if (!reader.next_row(fields, row_line)) break;
    } catch (const CsvReader::QuoteError&) {
      ++stats.total_rows;
      ++stats.malformed;
      stats.malformed_lines.push_back(row_line);
      // Resync at the next newline.
      std::string dummy;
      std::getline(in, dummy);
      ++reader.line;
      continue;
    }
    ++stats.total_rows;
    if (fields.size() == 1 && fields[0].empty()) {
      // Trailing blank line.
      --stats.total_rows;
      continue;
    }
    if (fields.size() < min_cols) {
      ++stats.malformed;
      stats.malformed_lines.push_back(row_line);
      continue;
    }
    RawRecord r{fields[bio_col], fields[gender_col], fields[prof_col]};
    if (is_blank(r.bio) || is_blank(r.gender) || is_blank(r.profession)) {
      ++stats.dropped_empty;
      continue;
    }
    ++stats.kept;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawRecord> load_jsonl(std::istream& in, const std::string& path,
                                  const CorpusSchema& schema, LoadStats& stats) {
  std::vector<RawRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++stats.total_rows;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++stats.malformed;
      stats.malformed_lines.push_back(line_no);
      continue;
    }
    auto get = [&](const std::string& key) -> std::string {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) return "";
      return it->get<std::string>();
    };
    RawRecord r{get(schema.bio), get(schema.gender), get(schema.profession)};
    if (is_blank(r.bio) || is_blank(r.gender) || is_blank(r.profession)) {
      ++stats.dropped_empty;
      continue;
    }
    ++stats.kept;
    out.push_back(std::move(r));
  }
  return out;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

int LabelMap::id_of(const std::string& name) const {
  auto it = name_to_id.find(name);
  if (it == name_to_id.end()) throw_data("UnknownLabel", "label '" + name + "' not in map");
  return it->second;
}

const std::string& LabelMap::name_of(int id) const {
  if (id < 0 || id >= size()) throw_data("UnknownLabel", "label id out of range");
  return id_to_name[static_cast<size_t>(id)];
}

LabelMap LabelMap::from_names(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  LabelMap m;
  m.id_to_name = std::move(names);
  for (size_t i = 0; i < m.id_to_name.size(); ++i)
    m.name_to_id[m.id_to_name[i]] = static_cast<int>(i);
  return m;
}

std::vector<RawRecord> load_corpus(const std::string& path, const CorpusSchema& schema,
                                   LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("FileNotFound", path);
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  st = LoadStats{};
  if (has_suffix(path, ".json") || has_suffix(path, ".jsonl") || has_suffix(path, ".ndjson"))
    return load_jsonl(in, path, schema, st);
  return load_csv(in, path, schema, st);
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    char lc = static_cast<char>(std::tolower(c));
    if (lc >= 'a' && lc <= 'z') {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += lc;
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::pair<LabelMap, LabelMap> build_label_maps(const std::vector<RawRecord>& records) {
  if (records.empty()) throw_data("EmptyInput", "no records to build label maps from");
  std::vector<std::string> genders, professions;
  genders.reserve(records.size());
  professions.reserve(records.size());
  for (const auto& r : records) {
    genders.push_back(r.gender);
    professions.push_back(r.profession);
  }
  LabelMap gender_map = LabelMap::from_names(std::move(genders));
  LabelMap profession_map = LabelMap::from_names(std::move(professions));
  if (gender_map.size() != 2) {
    throw_data("GenderCardinality", "expected exactly 2 distinct gender tokens, found " +
                                        std::to_string(gender_map.size()));
  }
  return {std::move(gender_map), std::move(profession_map)};
}

std::vector<Record> encode_records(const std::vector<RawRecord>& raw, const LabelMap& gender_map,
                                   const LabelMap& profession_map) {
  std::vector<Record> out;
  out.reserve(raw.size());
  for (const auto& r : raw) {
    Record rec;
    rec.text = normalize_text(r.bio);
    rec.gender_id = gender_map.id_of(r.gender);
    rec.profession_id = profession_map.id_of(r.profession);
    out.push_back(std::move(rec));
  }
  return out;
}

SplitSet split_dataset(const std::vector<Record>& records, std::array<double, 3> ratios,
                       uint64_t seed) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 || std::abs(sum - 1.0) > 1e-9)
    throw_usage("BadRatios", "split ratios must be positive and sum to 1");
  if (records.size() < 10)
    throw_data("TooFewRecords", "need at least 10 records to split, have " +
                                    std::to_string(records.size()));

  std::vector<size_t> order(records.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  deterministic_shuffle(order, seed);

  size_t n = records.size();
  size_t n_train = static_cast<size_t>(std::llround(static_cast<double>(n) * ratios[0]));
  size_t n_dev = static_cast<size_t>(std::llround(static_cast<double>(n) * ratios[1]));
  if (n_train + n_dev > n) n_dev = n - n_train;
  size_t n_test = n - n_train - n_dev;
  if (n_train == 0 || n_dev == 0 || n_test == 0)
    throw_data("TooFewRecords", "split produced an empty partition");

  SplitSet s;
  s.seed = seed;
  s.train.reserve(n_train);
  s.dev.reserve(n_dev);
  s.test.reserve(n_test);
  for (size_t i = 0; i < n; ++i) {
    const Record& r = records[order[i]];
    if (i < n_train) s.train.push_back(r);
    else if (i < n_train + n_dev) s.dev.push_back(r);
    else s.test.push_back(r);
  }
  return s;
}

DistributionStats compute_distribution_stats(const SplitSet& splits, int num_genders,
                                             int num_professions) {
  DistributionStats stats;
  const std::vector<Record>* parts[3] = {&splits.train, &splits.dev, &splits.test};
  std::vector<size_t> prof_total(static_cast<size_t>(num_professions), 0);
  std::vector<size_t> prof_g0(static_cast<size_t>(num_professions), 0);
  for (int p = 0; p < 3; ++p) {
    SplitDistribution& d = stats.splits[static_cast<size_t>(p)];
    d.total = parts[p]->size();
    d.gender_counts.assign(static_cast<size_t>(num_genders), 0);
    d.profession_counts.assign(static_cast<size_t>(num_professions), 0);
    for (const Record& r : *parts[p]) {
      d.gender_counts[static_cast<size_t>(r.gender_id)]++;
      d.profession_counts[static_cast<size_t>(r.profession_id)]++;
      prof_total[static_cast<size_t>(r.profession_id)]++;
      if (r.gender_id == 0) prof_g0[static_cast<size_t>(r.profession_id)]++;
    }
    d.gender_percent.assign(static_cast<size_t>(num_genders), 0.0);
    if (d.total > 0) {
      for (int g = 0; g < num_genders; ++g)
        d.gender_percent[static_cast<size_t>(g)] =
            100.0 * static_cast<double>(d.gender_counts[static_cast<size_t>(g)]) /
            static_cast<double>(d.total);
    }
  }
  stats.profession_gender_ratio.assign(static_cast<size_t>(num_professions), -1.0);
  for (int c = 0; c < num_professions; ++c) {
    size_t i = static_cast<size_t>(c);
    if (prof_total[i] > 0)
      stats.profession_gender_ratio[i] =
          static_cast<double>(prof_g0[i]) / static_cast<double>(prof_total[i]);
  }
  return stats;
}

}  // namespace fairbios
