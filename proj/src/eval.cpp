#include "readkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include <json.hpp>

#include "readkit/io.hpp"
#include "readkit/readability.hpp"
#include "readkit/text_core.hpp"

namespace readkit::eval {

using nlohmann::json;

Tokens metric_tokens(std::string_view input) {
  Tokens out;
  try {
    auto sentences =
        text::split_sentences(std::string(input), text::default_abbreviations());
    for (const auto& s : sentences) {
      for (auto& tok : text::tokenize_words(s, text::Language::Turkish)) {
        out.push_back(text::turkish_lower_str(tok.surface));
      }
    }
  } catch (const EmptyTextError&) {
    // no tokens
  }
  return out;
}

namespace {

double f1(double p, double r) {
  return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
}

std::map<std::string, std::int64_t> ngram_counts(const Tokens& tokens, int n) {
  std::map<std::string, std::int64_t> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k) key += '\x1f';
      key += tokens[i + static_cast<std::size_t>(k)];
    }
    ++counts[key];
  }
  return counts;
}

std::int64_t lcs_length(const Tokens& a, const Tokens& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0;
  std::vector<std::int64_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1
                                      : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

MetricScore rouge_n(const Tokens& candidate, const Tokens& reference, int n) {
  MetricScore score;
  score.metric = (n == 2) ? Metric::Rouge2 : Metric::Rouge1;
  auto cand = ngram_counts(candidate, n);
  auto ref = ngram_counts(reference, n);
  std::int64_t cand_total = 0, ref_total = 0, matches = 0;
  for (const auto& [k, c] : cand) cand_total += c;
  for (const auto& [k, c] : ref) ref_total += c;
  for (const auto& [k, c] : cand) {
    auto it = ref.find(k);
    if (it != ref.end()) matches += std::min(c, it->second);
  }
  if (cand_total > 0) score.precision = static_cast<double>(matches) / static_cast<double>(cand_total);
  if (ref_total > 0) score.recall = static_cast<double>(matches) / static_cast<double>(ref_total);
  score.f1_or_score = f1(score.precision, score.recall);
  return score;
}

MetricScore rouge_l(const Tokens& candidate, const Tokens& reference) {
  MetricScore score;
  score.metric = Metric::RougeL;
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (!candidate.empty()) score.precision = lcs / static_cast<double>(candidate.size());
  if (!reference.empty()) score.recall = lcs / static_cast<double>(reference.size());
  score.f1_or_score = f1(score.precision, score.recall);
  return score;
}

MetricScore meteor(const Tokens& candidate, const Tokens& reference,
                   const MeteorParams& params) {
  MetricScore score;
  score.metric = Metric::Meteor;
  if (candidate.empty() || reference.empty()) return score;

  // Match budget per token is the multiset-overlap count; the greedy pass
  // below realizes exactly that many pairs.
  std::map<std::string, std::int64_t> cand_counts, ref_counts;
  for (const auto& t : candidate) ++cand_counts[t];
  for (const auto& t : reference) ++ref_counts[t];
  std::map<std::string, std::int64_t> budget;
  std::int64_t m = 0;
  for (const auto& [tok, c] : cand_counts) {
    auto it = ref_counts.find(tok);
    if (it != ref_counts.end()) {
      budget[tok] = std::min(c, it->second);
      m += budget[tok];
    }
  }
  if (m == 0) return score;

  std::map<std::string, std::deque<std::size_t>> ref_positions;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    if (budget.count(reference[j])) ref_positions[reference[j]].push_back(j);
  }

  // Greedy left-to-right alignment: each matched candidate token takes the
  // earliest unused reference position.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    auto bit = budget.find(candidate[i]);
    if (bit == budget.end() || bit->second == 0) continue;
    auto& queue = ref_positions[candidate[i]];
    pairs.emplace_back(i, queue.front());
    queue.pop_front();
    --bit->second;
  }

  std::int64_t chunks = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (k == 0 || pairs[k].first != pairs[k - 1].first + 1 ||
        pairs[k].second != pairs[k - 1].second + 1) {
      ++chunks;
    }
  }

  const double dm = static_cast<double>(m);
  score.precision = dm / static_cast<double>(candidate.size());
  score.recall = dm / static_cast<double>(reference.size());
  const double denom = params.alpha * score.precision + (1.0 - params.alpha) * score.recall;
  const double f_mean = (denom > 0.0) ? score.precision * score.recall / denom : 0.0;
  const double penalty =
      params.gamma * std::pow(static_cast<double>(chunks) / dm, params.beta);
  score.f1_or_score = f_mean * (1.0 - penalty);
  return score;
}

MetricScore bleu(const Tokens& candidate, const Tokens& reference, int max_n) {
  MetricScore score;
  score.metric = Metric::Bleu;
  if (candidate.empty()) return score;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    std::int64_t total = 0, matches = 0;
    for (const auto& [k, c] : cand) {
      total += c;
      auto it = ref.find(k);
      if (it != ref.end()) matches += std::min(c, it->second);
    }
    const double p = (total > 0 && matches > 0)
                         ? static_cast<double>(matches) / static_cast<double>(total)
                         : 1e-9;
    log_sum += std::log(p);
  }
  const double geo = std::exp(log_sum / static_cast<double>(max_n));
  const double bp =
      (candidate.size() >= reference.size())
          ? 1.0
          : std::exp(1.0 - static_cast<double>(reference.size()) /
                               static_cast<double>(candidate.size()));
  score.precision = geo;
  score.recall = bp;
  score.f1_or_score = geo * bp;
  return score;
}

namespace {

double achieved_yod_of(const EvalPair& pair) {
  if (pair.achieved_yod) return *pair.achieved_yod;
  try {
    auto stats = text::compute_stats(pair.candidate, text::Language::Turkish,
                                          text::HardWordRule::PlainThreeSyllables);
    return readability::yod(stats).value;
  } catch (const Error&) {
    return 0.0;
  }
}

PairScores score_one(const EvalPair& pair) {
  PairScores s;
  auto cand = metric_tokens(pair.candidate);
  auto ref = metric_tokens(pair.reference);
  s.rouge1 = rouge_n(cand, ref, 1).f1_or_score;
  s.rouge2 = rouge_n(cand, ref, 2).f1_or_score;
  s.rouge_l = rouge_l(cand, ref).f1_or_score;
  s.meteor = meteor(cand, ref).f1_or_score;
  s.bleu = bleu(cand, ref).f1_or_score;
  s.achieved_yod = achieved_yod_of(pair);
  s.target_level = pair.target_level;
  return s;
}

struct Accumulator {
  std::int64_t count = 0;
  double rouge1 = 0, rouge2 = 0, rouge_l = 0, meteor = 0, bleu = 0;
  std::int64_t successes = 0;

  void add(const PairScores& s, bool success) {
    ++count;
    rouge1 += s.rouge1;
    rouge2 += s.rouge2;
    rouge_l += s.rouge_l;
    meteor += s.meteor;
    bleu += s.bleu;
    if (success) ++successes;
  }

  ReportRow row(std::string label) const {
    ReportRow r;
    r.label = std::move(label);
    r.count = count;
    if (count > 0) {
      const double n = static_cast<double>(count);
      r.rouge1 = rouge1 / n;
      r.rouge2 = rouge2 / n;
      r.rouge_l = rouge_l / n;
      r.meteor = meteor / n;
      r.bleu = bleu / n;
      r.success_rate = static_cast<double>(successes) / n;
    }
    return r;
  }
};

}  // namespace

std::vector<PairScores> score_pairs(const std::vector<EvalPair>& pairs, Exec exec) {
  std::vector<PairScores> out(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = score_one(pairs[static_cast<std::size_t>(i)]);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = score_one(pairs[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

EvalReport evaluate_run(const std::vector<EvalPair>& pairs, double tolerance,
                        Exec exec) {
  if (pairs.empty()) throw EmptyRunError();
  for (const auto& p : pairs) {
    if (p.target_level < 1 || p.target_level > 16) throw UnknownLevelError(p.target_level);
  }

  auto scores = score_pairs(pairs, exec);

  EvalReport report;
  report.tolerance = tolerance;
  std::array<Accumulator, 16> level_acc;
  std::array<Accumulator, 4> group_acc;
  Accumulator overall_acc;

  for (const auto& s : scores) {
    const bool success = readability::yod_success(
        s.achieved_yod, readability::YodLevel{s.target_level}, tolerance);
    level_acc[static_cast<std::size_t>(s.target_level - 1)].add(s, success);
    for (std::size_t g = 0; g < kGroups.size(); ++g) {
      if (s.target_level >= kGroups[g].lo && s.target_level <= kGroups[g].hi) {
        group_acc[g].add(s, success);
      }
    }
    overall_acc.add(s, success);
  }

  for (int lvl = 1; lvl <= 16; ++lvl) {
    report.per_level[static_cast<std::size_t>(lvl - 1)] =
        level_acc[static_cast<std::size_t>(lvl - 1)].row(std::to_string(lvl));
  }
  for (std::size_t g = 0; g < kGroups.size(); ++g) {
    report.per_group[g] = group_acc[g].row(kGroups[g].name);
  }
  report.overall = overall_acc.row("overall");
  return report;
}

namespace {

void append_row_cells(std::ostringstream& out, const ReportRow& r) {
  out << r.count << ',' << io::fmt4(r.rouge1) << ',' << io::fmt4(r.rouge2) << ','
      << io::fmt4(r.rouge_l) << ',' << io::fmt4(r.meteor) << ',' << io::fmt4(r.bleu)
      << ',' << io::fmt4(r.success_rate);
}

json row_to_json(const ReportRow& r) {
  return json{{"label", r.label},       {"count", r.count},
              {"rouge1", r.rouge1},     {"rouge2", r.rouge2},
              {"rougeL", r.rouge_l},    {"meteor", r.meteor},
              {"bleu", r.bleu},         {"success_rate", r.success_rate}};
}

}  // namespace

std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  auto line = [&](const std::string& label, const ReportRow& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %7lld  %7s %7s %7s %7s %7s %9s\n",
                  label.c_str(), static_cast<long long>(r.count),
                  io::fmt4(r.rouge1).c_str(), io::fmt4(r.rouge2).c_str(),
                  io::fmt4(r.rouge_l).c_str(), io::fmt4(r.meteor).c_str(),
                  io::fmt4(r.bleu).c_str(), io::fmt4(r.success_rate).c_str());
    out << buf;
  };
  char head[160];
  std::snprintf(head, sizeof(head), "%-22s %7s  %7s %7s %7s %7s %7s %9s\n", "level",
                "count", "rouge1", "rouge2", "rougeL", "meteor", "bleu", "success");
  out << head;
  for (const auto& r : report.per_level) line(r.label, r);
  out << '\n';
  std::snprintf(head, sizeof(head), "%-22s %7s  %7s %7s %7s %7s %7s %9s\n", "group",
                "count", "rouge1", "rouge2", "rougeL", "meteor", "bleu", "success");
  out << head;
  for (const auto& r : report.per_group) line(r.label, r);
  out << '\n';
  line(report.overall.label, report.overall);
  return out.str();
}

std::string render_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "section,label,count,rouge1,rouge2,rougeL,meteor,bleu,success_rate\n";
  for (const auto& r : report.per_level) {
    out << "level," << io::csv_escape(r.label) << ',';
    append_row_cells(out, r);
    out << '\n';
  }
  for (const auto& r : report.per_group) {
    out << "group," << io::csv_escape(r.label) << ',';
    append_row_cells(out, r);
    out << '\n';
  }
  out << "overall," << io::csv_escape(report.overall.label) << ',';
  append_row_cells(out, report.overall);
  out << '\n';
  return out.str();
}

std::string render_json(const EvalReport& report) {
  json doc;
  doc["tolerance"] = report.tolerance;
  doc["per_level"] = json::array();
  for (const auto& r : report.per_level) doc["per_level"].push_back(row_to_json(r));
  doc["per_group"] = json::array();
  for (const auto& r : report.per_group) doc["per_group"].push_back(row_to_json(r));
  doc["overall"] = row_to_json(report.overall);
  return doc.dump(2) + "\n";
}

LoadResult load_pairs(const std::string& path) {
  return load_pairs_content(io::read_file(path));
}

LoadResult load_pairs_content(std::string_view content) {
  LoadResult result;
  io::for_each_line(content, [&](size_t line_no, std::string_view line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.errors.push_back({line_no, "not a JSON object"});
      return;
    }
    EvalPair pair;
    if (obj.contains("id") && obj["id"].is_string()) {
      pair.id = obj["id"].get<std::string>();
    } else if (obj.contains("id") && obj["id"].is_number_integer()) {
      pair.id = std::to_string(obj["id"].get<std::int64_t>());
    }
    if (!obj.contains("candidate") || !obj["candidate"].is_string()) {
      result.errors.push_back({line_no, "missing candidate"});
      return;
    }
    if (!obj.contains("reference") || !obj["reference"].is_string()) {
      result.errors.push_back({line_no, "missing reference"});
      return;
    }
    pair.candidate = obj["candidate"].get<std::string>();
    pair.reference = obj["reference"].get<std::string>();
    if (!obj.contains("target_yod") || !obj["target_yod"].is_number_integer()) {
      result.errors.push_back({line_no, "missing integer target_yod"});
      return;
    }
    auto lvl = obj["target_yod"].get<std::int64_t>();
    if (lvl < 1 || lvl > 16) {
      result.errors.push_back({line_no, "target_yod out of range [1,16]"});
      return;
    }
    pair.target_level = static_cast<int>(lvl);
    if (obj.contains("achieved_yod")) {
      if (!obj["achieved_yod"].is_number()) {
        result.errors.push_back({line_no, "achieved_yod must be a number"});
        return;
      }
      pair.achieved_yod = obj["achieved_yod"].get<double>();
    }
    result.pairs.push_back(std::move(pair));
  });
  return result;
}

}  // namespace readkit::eval
