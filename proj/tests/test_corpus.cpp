#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "readkit/corpus.hpp"

using namespace readkit;
using namespace readkit::corpus;

namespace {

std::vector<CorpusRecord> synthetic_corpus(const std::vector<int>& per_level) {
  std::vector<CorpusRecord> records;
  for (int lvl = 1; lvl <= static_cast<int>(per_level.size()); ++lvl) {
    for (int k = 0; k < per_level[static_cast<std::size_t>(lvl - 1)]; ++k) {
      CorpusRecord r;
      r.id = "L" + std::to_string(lvl) + "-" + std::to_string(k);
      r.summary = "Bu ve şu.";
      r.yod_level = lvl;
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::multiset<std::string> ids_of(const std::vector<CorpusRecord>& records) {
  std::multiset<std::string> out;
  for (const auto& r : records) out.insert(r.id);
  return out;
}

}  // namespace

TEST_CASE("whitespace token count") {
  CHECK(whitespace_token_count("a  b\tc\n") == 3);
  CHECK(whitespace_token_count("") == 0);
  CHECK(whitespace_token_count("   ") == 0);
  CHECK(whitespace_token_count("tek") == 1);
}

TEST_CASE("yod levels for a batch of summaries") {
  const std::vector<std::string> summaries = {
      "Araba araba araba araba.",  // sqrt(13.44) -> level 4
      "!!!",                       // no words -> sentinel
      "Bu ve şu.",                 // yod 0 -> clamped to level 1
  };
  auto levels = compute_yod_levels(summaries, Exec::Serial);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0] == 4);
  CHECK(levels[1] == -1);
  CHECK(levels[2] == 1);

  CHECK(compute_yod_levels(summaries, Exec::Parallel) == levels);
}

TEST_CASE("ingest isolates bad lines and batch-scores missing levels") {
  const std::string content =
      "{\"id\": 1, \"source\": \"Kaynak metin.\", \"summary\": "
      "\"Araba araba araba araba.\", \"yod\": 4}\n"
      "not json\n"
      "{\"id\": \"r2\", \"summary\": \"Bu ve şu.\"}\n"
      "{\"id\": \"r3\", \"summary\": \"\"}\n"
      "{\"id\": \"r4\", \"summary\": \"Geldi.\", \"yod\": 99}\n"
      "{\"id\": \"r5\", \"summary\": \"!!!\"}\n"
      "{\"summary\": \"Kimliksiz.\"}\n";
  auto result = ingest_content(content);

  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].id == "1");
  CHECK(result.records[0].yod_level == 4);
  CHECK(result.records[0].source_text == "Kaynak metin.");
  CHECK(result.records[1].id == "r2");
  CHECK(result.records[1].yod_level == 1);  // computed from the summary

  std::set<std::size_t> error_lines;
  for (const auto& e : result.errors) error_lines.insert(e.line);
  CHECK(error_lines == std::set<std::size_t>{2, 4, 5, 6, 7});
}

TEST_CASE("ingest serial and parallel agree") {
  std::string content;
  for (int i = 0; i < 40; ++i) {
    content += "{\"id\": " + std::to_string(i) +
               ", \"summary\": \"Araba araba araba araba.\"}\n";
  }
  auto serial = ingest_content(content, Exec::Serial);
  auto parallel = ingest_content(content, Exec::Parallel);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].yod_level == parallel.records[i].yod_level);
  }
}

TEST_CASE("record serialization round trips through ingest") {
  CorpusRecord rec;
  rec.id = "x1";
  rec.source_text = "Uzun \"kaynak\" metin.";
  rec.summary = "Kısa özet burada.";
  rec.yod_level = 7;
  rec.origin = "human";
  auto line = record_to_jsonl_line(rec);

  auto result = ingest_content(line + "\n");
  REQUIRE(result.records.size() == 1);
  REQUIRE(result.errors.empty());
  const auto& parsed = result.records[0];
  CHECK(parsed.id == rec.id);
  CHECK(parsed.source_text == rec.source_text);
  CHECK(parsed.summary == rec.summary);
  CHECK(parsed.yod_level == rec.yod_level);
  CHECK(parsed.origin == rec.origin);
}

TEST_CASE("histogram counts per level") {
  auto records = synthetic_corpus({2, 1});
  CorpusRecord top;
  top.id = "t";
  top.summary = "s";
  top.yod_level = 16;
  records.push_back(top);

  auto h = histogram(records);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[15] == 1);
  CHECK(h.total() == 4);
  CHECK(h.at_level(1) == 2);
  CHECK(h.at_level(3) == 0);
  CHECK_THROWS_AS(h.at_level(0), UnknownLevelError);
  CHECK_THROWS_AS(h.at_level(17), UnknownLevelError);

  records.back().yod_level = 42;
  CHECK_THROWS_AS(histogram(records), UnknownLevelError);
}

TEST_CASE("seeded shuffle is a deterministic permutation") {
  std::vector<std::size_t> a(10);
  std::iota(a.begin(), a.end(), 0);
  auto b = a;
  auto c = a;
  seeded_shuffle(a, 7);
  seeded_shuffle(b, 7);
  seeded_shuffle(c, 8);
  CHECK(a == b);
  CHECK(a != c);

  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expect(10);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
}

TEST_CASE("build_splits takes exact quotas and partitions the corpus") {
  std::vector<int> per_level(16);
  for (int lvl = 1; lvl <= 16; ++lvl) {
    per_level[static_cast<std::size_t>(lvl - 1)] = 6 + (lvl % 4);
  }
  auto records = synthetic_corpus(per_level);

  SplitSpec spec;
  spec.per_level_eval_quota = 3;
  spec.seed = 11;
  auto splits = build_splits(records, spec);

  auto test_h = histogram(splits.test);
  auto val_h = histogram(splits.validation);
  auto train_h = histogram(splits.train);
  for (int lvl = 1; lvl <= 16; ++lvl) {
    CHECK(test_h.at_level(lvl) == 3);
    CHECK(val_h.at_level(lvl) == 3);
    CHECK(train_h.at_level(lvl) ==
          per_level[static_cast<std::size_t>(lvl - 1)] - 6);
  }

  // Partition: every input record lands in exactly one split.
  auto all = ids_of(splits.train);
  for (const auto& id : ids_of(splits.test)) all.insert(id);
  for (const auto& id : ids_of(splits.validation)) all.insert(id);
  CHECK(all == ids_of(records));

  std::set<std::string> train_set(all.begin(), all.end());
  CHECK(train_set.size() == records.size());  // no duplicates anywhere
}

TEST_CASE("build_splits is deterministic and seed-sensitive") {
  auto records = synthetic_corpus(std::vector<int>(16, 8));
  SplitSpec spec;
  spec.per_level_eval_quota = 2;
  spec.seed = 5;

  auto a = build_splits(records, spec);
  auto b = build_splits(records, spec);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    CHECK(a.test[i].id == b.test[i].id);
  }

  spec.seed = 6;
  auto c = build_splits(records, spec);
  bool identical = a.test.size() == c.test.size();
  if (identical) {
    for (std::size_t i = 0; i < a.test.size(); ++i) {
      if (a.test[i].id != c.test[i].id) {
        identical = false;
        break;
      }
    }
  }
  CHECK_FALSE(identical);
}

TEST_CASE("build_splits preserves input order inside each split") {
  auto records = synthetic_corpus(std::vector<int>(1, 9));
  SplitSpec spec;
  spec.per_level_eval_quota = 2;
  spec.seed = 3;
  auto splits = build_splits(records, spec);

  std::map<std::string, std::size_t> input_pos;
  for (std::size_t i = 0; i < records.size(); ++i) input_pos[records[i].id] = i;
  for (const auto* split : {&splits.train, &splits.test, &splits.validation}) {
    for (std::size_t i = 1; i < split->size(); ++i) {
      CHECK(input_pos[(*split)[i - 1].id] < input_pos[(*split)[i].id]);
    }
  }
}

TEST_CASE("build_splits quota zero sends everything to train") {
  auto records = synthetic_corpus({3, 2});
  SplitSpec spec;
  spec.per_level_eval_quota = 0;
  auto splits = build_splits(records, spec);
  CHECK(splits.test.empty());
  CHECK(splits.validation.empty());
  REQUIRE(splits.train.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(splits.train[i].id == records[i].id);
  }
}

TEST_CASE("build_splits rejects deficient levels and ignores absent ones") {
  // Level 2 present but below 2*quota.
  auto records = synthetic_corpus({8, 3});
  SplitSpec spec;
  spec.per_level_eval_quota = 2;
  CHECK_THROWS_AS(build_splits(records, spec), InsufficientLevelError);
  try {
    build_splits(records, spec);
  } catch (const InsufficientLevelError& e) {
    CHECK(e.level == 2);
    CHECK(e.available == 3);
    CHECK(e.required == 4);
  }

  // Levels 3..16 entirely absent: not an error.
  auto ok = build_splits(synthetic_corpus({8, 4}), spec);
  CHECK(ok.test.size() == 4);
  CHECK(ok.validation.size() == 4);
}

TEST_CASE("sampling weights are inverse-frequency with mean one") {
  YodHistogram h;
  h.counts[0] = 100;
  h.counts[1] = 300;
  auto w = sampling_weights(h);
  CHECK(w[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t i = 2; i < 16; ++i) CHECK(w[i] == 0.0);

  YodHistogram uniform;
  for (auto& c : uniform.counts) c = 10;
  auto wu = sampling_weights(uniform);
  for (double x : wu) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));

  YodHistogram skew;
  skew.counts[0] = 1000;
  skew.counts[4] = 10;
  skew.counts[9] = 50;
  auto ws = sampling_weights(skew);
  double mean = 0.0;
  int nonzero = 0;
  for (double x : ws) {
    if (x > 0.0) {
      mean += x;
      ++nonzero;
    }
  }
  CHECK(nonzero == 3);
  CHECK(mean / nonzero == doctest::Approx(1.0).epsilon(1e-12));

  YodHistogram empty;
  CHECK_THROWS_AS(sampling_weights(empty), EmptyHistogramError);
}

TEST_CASE("token length stats per level") {
  std::vector<CorpusRecord> records;
  CorpusRecord a;
  a.id = "a";
  a.summary = "bir iki";
  a.yod_level = 1;
  CorpusRecord b;
  b.id = "b";
  b.summary = "bir iki üç dört";
  b.yod_level = 1;
  CorpusRecord c;
  c.id = "c";
  c.summary = "tek";
  c.yod_level = 2;
  records = {a, b, c};

  auto stats = token_length_stats(records);
  REQUIRE(stats.size() == 2);
  CHECK(stats.at(1) == doctest::Approx(3.0));
  CHECK(stats.at(2) == doctest::Approx(1.0));
  CHECK(stats.find(3) == stats.end());
}

TEST_CASE("filter_by_max_words drops long summaries") {
  std::vector<CorpusRecord> records;
  CorpusRecord a;
  a.id = "short";
  a.summary = "bir iki üç";
  a.yod_level = 1;
  CorpusRecord b;
  b.id = "long";
  b.summary = "bir iki üç dört beş";
  b.yod_level = 1;
  records = {a, b};

  auto kept = filter_by_max_words(records, 3);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "short");
  CHECK(filter_by_max_words(records, 5).size() == 2);
}

TEST_CASE("weighted sampler honors zero weights and determinism") {
  WeightedSampler always_one({0.0, 1.0}, 1);
  for (int i = 0; i < 100; ++i) CHECK(always_one.draw() == 1);

  WeightedSampler s1({1.0, 0.0, 3.0}, 9);
  WeightedSampler s2({1.0, 0.0, 3.0}, 9);
  std::map<std::size_t, int> seen;
  for (int i = 0; i < 400; ++i) {
    auto d = s1.draw();
    CHECK(d == s2.draw());
    CHECK(d != 1);
    ++seen[d];
  }
  CHECK(seen[0] > 0);
  CHECK(seen[2] > seen[0]);  // three times the weight

  CHECK_THROWS_AS(WeightedSampler({1.0, -0.5}, 0), Error);
  CHECK_THROWS_AS(WeightedSampler({}, 0), EmptyHistogramError);
  CHECK_THROWS_AS(WeightedSampler({0.0, 0.0}, 0), EmptyHistogramError);
}

TEST_CASE("weighted draws from skewed counts come out roughly uniform") {
  YodHistogram h;
  for (std::size_t i = 0; i < 16; ++i) h.counts[i] = (i == 0) ? 1000 : 100;
  auto w = sampling_weights(h);

  // One entry per record, each carrying its level's weight: drawing records
  // this way is what flattens the level distribution.
  std::vector<double> record_weights;
  std::vector<std::size_t> record_level;
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::int64_t k = 0; k < h.counts[i]; ++k) {
      record_weights.push_back(w[i]);
      record_level.push_back(i);
    }
  }
  WeightedSampler sampler(record_weights, 13);

  std::array<int, 16> freq{};
  const int draws = 3200;
  for (int i = 0; i < draws; ++i) ++freq[record_level[sampler.draw()]];

  const double expected = draws / 16.0;
  double chi2 = 0.0;
  for (int f : freq) {
    const double d = f - expected;
    chi2 += d * d / expected;
  }
  // Loose smoke bound; the acceptance suite pins the chi-square threshold.
  CHECK(chi2 < 45.0);
}
