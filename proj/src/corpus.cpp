#include "readkit/corpus.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "readkit/io.hpp"
#include "readkit/readability.hpp"
#include "readkit/text_core.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace readkit::corpus {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

int yod_level_of_text(const std::string& input) {
  try {
    auto stats = text::compute_stats(input, text::Language::Turkish,
                                     text::HardWordRule::PlainThreeSyllables);
    auto score = readability::yod(stats);
    return readability::yod_to_level(score.value).level;
  } catch (const Error&) {
    return -1;
  }
}

}  // namespace

std::int64_t YodHistogram::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::int64_t YodHistogram::at_level(int level) const {
  if (level < 1 || level > 16) throw UnknownLevelError(level);
  return counts[static_cast<std::size_t>(level - 1)];
}

std::vector<int> compute_yod_levels(const std::vector<std::string>& summaries,
                                    Exec exec) {
  std::vector<int> levels(summaries.size(), -1);
  const auto n = static_cast<std::int64_t>(summaries.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
      levels[static_cast<std::size_t>(i)] =
          yod_level_of_text(summaries[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      levels[static_cast<std::size_t>(i)] =
          yod_level_of_text(summaries[static_cast<std::size_t>(i)]);
    }
  }
  return levels;
}

IngestResult ingest(const std::string& path, Exec exec) {
  return ingest_content(io::read_file(path), exec);
}

IngestResult ingest_content(std::string_view content, Exec exec) {
  IngestResult result;
  // Positions of records whose level still has to be computed from the
  // summary, so scoring can run as one batch.
  std::vector<std::size_t> pending;
  std::vector<size_t> pending_lines;

  io::for_each_line(content, [&](size_t line_no, std::string_view line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.errors.push_back({line_no, "not a JSON object"});
      return;
    }
    CorpusRecord rec;
    if (obj.contains("id") && obj["id"].is_string()) {
      rec.id = obj["id"].get<std::string>();
    } else if (obj.contains("id") && obj["id"].is_number_integer()) {
      rec.id = std::to_string(obj["id"].get<std::int64_t>());
    } else {
      result.errors.push_back({line_no, "missing or non-string id"});
      return;
    }
    if (!obj.contains("summary") || !obj["summary"].is_string() ||
        obj["summary"].get<std::string>().empty()) {
      result.errors.push_back({line_no, "missing or empty summary"});
      return;
    }
    rec.summary = obj["summary"].get<std::string>();
    if (obj.contains("source") && obj["source"].is_string()) {
      rec.source_text = obj["source"].get<std::string>();
    }
    if (obj.contains("origin") && obj["origin"].is_string()) {
      rec.origin = obj["origin"].get<std::string>();
    }
    if (obj.contains("yod")) {
      if (!obj["yod"].is_number_integer()) {
        result.errors.push_back({line_no, "yod must be an integer"});
        return;
      }
      auto lvl = obj["yod"].get<std::int64_t>();
      if (lvl < 1 || lvl > 16) {
        result.errors.push_back({line_no, "yod out of range [1,16]"});
        return;
      }
      rec.yod_level = static_cast<int>(lvl);
    } else {
      rec.yod_level = 0;  // placeholder until scored below
      pending.push_back(result.records.size());
      pending_lines.push_back(line_no);
    }
    result.records.push_back(std::move(rec));
  });

  if (!pending.empty()) {
    std::vector<std::string> texts;
    texts.reserve(pending.size());
    for (auto idx : pending) texts.push_back(result.records[idx].summary);
    auto levels = compute_yod_levels(texts, exec);
    std::vector<bool> drop(result.records.size(), false);
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (levels[k] < 0) {
        result.errors.push_back({pending_lines[k], "summary has no scoreable words"});
        drop[pending[k]] = true;
      } else {
        result.records[pending[k]].yod_level = levels[k];
      }
    }
    std::vector<CorpusRecord> kept;
    kept.reserve(result.records.size());
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      if (!drop[i]) kept.push_back(std::move(result.records[i]));
    }
    result.records = std::move(kept);
  }
  return result;
}

std::string record_to_jsonl_line(const CorpusRecord& rec) {
  json obj;
  obj["id"] = rec.id;
  obj["source"] = rec.source_text;
  obj["summary"] = rec.summary;
  obj["yod"] = rec.yod_level;
  if (!rec.origin.empty()) obj["origin"] = rec.origin;
  return obj.dump();
}

YodHistogram histogram(const std::vector<CorpusRecord>& records) {
  YodHistogram h;
  for (const auto& rec : records) {
    if (rec.yod_level < 1 || rec.yod_level > 16) throw UnknownLevelError(rec.yod_level);
    ++h.counts[static_cast<std::size_t>(rec.yod_level - 1)];
  }
  return h;
}

void seeded_shuffle(std::vector<std::size_t>& indices, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (std::size_t i = indices.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(splitmix64(state) % i);
    std::swap(indices[i - 1], indices[j]);
  }
}

Splits build_splits(const std::vector<CorpusRecord>& records, const SplitSpec& spec) {
  std::array<std::vector<std::size_t>, 16> by_level;
  for (std::size_t i = 0; i < records.size(); ++i) {
    int lvl = records[i].yod_level;
    if (lvl < 1 || lvl > 16) throw UnknownLevelError(lvl);
    by_level[static_cast<std::size_t>(lvl - 1)].push_back(i);
  }

  const std::int64_t required = 2 * spec.per_level_eval_quota;
  for (int lvl = 1; lvl <= 16; ++lvl) {
    const auto& bucket = by_level[static_cast<std::size_t>(lvl - 1)];
    if (!bucket.empty() && static_cast<std::int64_t>(bucket.size()) < required) {
      throw InsufficientLevelError(lvl, static_cast<std::int64_t>(bucket.size()), required);
    }
  }

  enum class Dest : unsigned char { Train, Test, Validation };
  std::vector<Dest> dest(records.size(), Dest::Train);
  for (int lvl = 1; lvl <= 16; ++lvl) {
    auto bucket = by_level[static_cast<std::size_t>(lvl - 1)];
    if (bucket.empty()) continue;
    // Per-level stream keeps one level's draw independent of the others.
    seeded_shuffle(bucket, spec.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(lvl));
    const auto quota = static_cast<std::size_t>(spec.per_level_eval_quota);
    for (std::size_t k = 0; k < quota; ++k) dest[bucket[k]] = Dest::Test;
    for (std::size_t k = quota; k < 2 * quota; ++k) dest[bucket[k]] = Dest::Validation;
  }

  Splits out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    switch (dest[i]) {
      case Dest::Train: out.train.push_back(records[i]); break;
      case Dest::Test: out.test.push_back(records[i]); break;
      case Dest::Validation: out.validation.push_back(records[i]); break;
    }
  }
  return out;
}

std::array<double, 16> sampling_weights(const YodHistogram& h) {
  std::array<double, 16> weights{};
  const double total = static_cast<double>(h.total());
  if (total <= 0) throw EmptyHistogramError();
  int nonzero = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < 16; ++i) {
    if (h.counts[i] > 0) {
      weights[i] = total / static_cast<double>(h.counts[i]);
      sum += weights[i];
      ++nonzero;
    }
  }
  const double mean = sum / static_cast<double>(nonzero);
  for (auto& w : weights) w /= mean;
  return weights;
}

std::int64_t whitespace_token_count(std::string_view text) {
  std::int64_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = (c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                        c == '\f' || c == '\v');
    if (!space && !in_token) {
      ++count;
      in_token = true;
    } else if (space) {
      in_token = false;
    }
  }
  return count;
}

std::map<int, double> token_length_stats(const std::vector<CorpusRecord>& records) {
  std::map<int, std::pair<std::int64_t, std::int64_t>> acc;  // level -> (sum, n)
  for (const auto& rec : records) {
    auto& [sum, n] = acc[rec.yod_level];
    sum += whitespace_token_count(rec.summary);
    ++n;
  }
  std::map<int, double> out;
  for (const auto& [lvl, sn] : acc) {
    out[lvl] = static_cast<double>(sn.first) / static_cast<double>(sn.second);
  }
  return out;
}

std::vector<CorpusRecord> filter_by_max_words(const std::vector<CorpusRecord>& records,
                                              std::int64_t max_words) {
  std::vector<CorpusRecord> out;
  for (const auto& rec : records) {
    if (whitespace_token_count(rec.summary) <= max_words) out.push_back(rec);
  }
  return out;
}

WeightedSampler::WeightedSampler(const std::vector<double>& weights, std::uint64_t seed)
    : state_(seed) {
  double running = 0.0;
  cumulative_.reserve(weights.size());
  for (double w : weights) {
    if (w < 0.0) throw Error("negative sampling weight");
    running += w;
    cumulative_.push_back(running);
  }
  if (cumulative_.empty() || running <= 0.0) throw EmptyHistogramError();
}

std::size_t WeightedSampler::draw() {
  const double u = uniform01(state_) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace readkit::corpus
