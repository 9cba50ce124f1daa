#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "readkit/common.hpp"

namespace readkit::corpus {

struct CorpusRecord {
  std::string id;
  std::string source_text;
  std::string summary;
  int yod_level = 1;  // [1,16]
  std::string origin;
};

struct LineError {
  size_t line = 0;
  std::string message;
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  std::vector<LineError> errors;
};

struct YodHistogram {
  // counts[l-1] holds level l.
  std::array<std::int64_t, 16> counts{};

  std::int64_t total() const;
  std::int64_t at_level(int level) const;
};

struct SplitSpec {
  std::int64_t per_level_eval_quota = 20;
  std::uint64_t seed = 0;
};

struct Splits {
  std::vector<CorpusRecord> train;
  std::vector<CorpusRecord> test;
  std::vector<CorpusRecord> validation;
};

// Difficulty levels for a batch of summaries; -1 where the text has no words.
// Serial and parallel paths produce identical output.
std::vector<int> compute_yod_levels(const std::vector<std::string>& summaries,
                                    Exec exec = Exec::Parallel);

// One record per JSONL line. Records without a "yod" field get their level
// computed from the summary. Bad lines land in the error list; good lines
// around them still parse.
IngestResult ingest(const std::string& path, Exec exec = Exec::Parallel);
IngestResult ingest_content(std::string_view content, Exec exec = Exec::Parallel);

std::string record_to_jsonl_line(const CorpusRecord& rec);

YodHistogram histogram(const std::vector<CorpusRecord>& records);

// Per-level seeded shuffles; test and validation take `quota` records each,
// train keeps the rest. Original input order is preserved inside each split.
Splits build_splits(const std::vector<CorpusRecord>& records, const SplitSpec& spec);

// Inverse-frequency weights, scaled so the mean over nonzero levels is 1.
// Zero-count levels get weight 0.
std::array<double, 16> sampling_weights(const YodHistogram& h);

// Mean whitespace-token count of summaries per level; absent levels omitted.
std::map<int, double> token_length_stats(const std::vector<CorpusRecord>& records);

// Drops records whose summary exceeds max_words whitespace tokens.
std::vector<CorpusRecord> filter_by_max_words(const std::vector<CorpusRecord>& records,
                                              std::int64_t max_words);

std::int64_t whitespace_token_count(std::string_view text);

// Draws indices with probability proportional to weight. Deterministic for a
// given seed on any platform.
class WeightedSampler {
 public:
  WeightedSampler(const std::vector<double>& weights, std::uint64_t seed);
  std::size_t draw();

 private:
  std::vector<double> cumulative_;
  std::uint64_t state_;
};

// Deterministic in-place Fisher-Yates; std::shuffle is implementation-defined.
void seeded_shuffle(std::vector<std::size_t>& indices, std::uint64_t seed);

}  // namespace readkit::corpus
