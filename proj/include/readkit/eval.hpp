#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "readkit/common.hpp"
#include "readkit/corpus.hpp"

namespace readkit::eval {

enum class Metric { Rouge1, Rouge2, RougeL, Meteor, Bleu };

struct MetricScore {
  Metric metric = Metric::Rouge1;
  double precision = 0.0;
  double recall = 0.0;
  double f1_or_score = 0.0;
};

using Tokens = std::vector<std::string>;

// Word tokens, Turkish-lowercased; applied identically to both sides of
// every metric.
Tokens metric_tokens(std::string_view text);

MetricScore rouge_n(const Tokens& candidate, const Tokens& reference, int n);
MetricScore rouge_l(const Tokens& candidate, const Tokens& reference);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};
MetricScore meteor(const Tokens& candidate, const Tokens& reference,
                   const MeteorParams& params = {});

MetricScore bleu(const Tokens& candidate, const Tokens& reference, int max_n = 4);

struct EvalPair {
  std::string id;
  std::string candidate;
  std::string reference;
  int target_level = 1;  // [1,16]
  std::optional<double> achieved_yod;
};

struct PairScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  double bleu = 0.0;
  double achieved_yod = 0.0;
  int target_level = 1;
};

struct ReportRow {
  std::string label;
  std::int64_t count = 0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  double bleu = 0.0;
  double success_rate = 0.0;
};

struct EvalReport {
  double tolerance = 1.5;
  std::array<ReportRow, 16> per_level;  // index l-1 = level l
  std::array<ReportRow, 4> per_group;   // 1-8, 9-12, 13-15, 16
  ReportRow overall;
};

// Per-pair metric scoring; the parallel path matches the serial one exactly.
// Pairs without achieved_yod get it computed from the candidate text (0 when
// the candidate has no scoreable words).
std::vector<PairScores> score_pairs(const std::vector<EvalPair>& pairs,
                                    Exec exec = Exec::Parallel);

EvalReport evaluate_run(const std::vector<EvalPair>& pairs, double tolerance,
                        Exec exec = Exec::Parallel);

struct GroupBand {
  const char* name;
  int lo;
  int hi;
};
// Education-level bands over difficulty levels.
inline constexpr std::array<GroupBand, 4> kGroups{{
    {"elementary (1-8)", 1, 8},
    {"high school (9-12)", 9, 12},
    {"undergraduate (13-15)", 13, 15},
    {"academic (16)", 16, 16},
}};

std::string render_table(const EvalReport& report);
std::string render_csv(const EvalReport& report);
std::string render_json(const EvalReport& report);

struct LoadResult {
  std::vector<EvalPair> pairs;
  std::vector<corpus::LineError> errors;
};
// JSONL of {id, candidate, reference, target_yod, achieved_yod?}.
LoadResult load_pairs(const std::string& path);
LoadResult load_pairs_content(std::string_view content);

}  // namespace readkit::eval
