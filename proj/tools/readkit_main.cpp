#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "readkit/corpus.hpp"
#include "readkit/eval.hpp"
#include "readkit/io.hpp"
#include "readkit/nn/gradcheck.hpp"
#include "readkit/nn/train.hpp"
#include "readkit/readability.hpp"
#include "readkit/text_core.hpp"

namespace {

using namespace readkit;
using nlohmann::json;

constexpr std::uint64_t kDefaultSeed = 42;

// Exit-code contract: 0 ok, 2 I/O, 3 empty or invalid data, 4 split
// infeasible, 5 numeric failure.
constexpr int kExitIo = 2;
constexpr int kExitData = 3;
constexpr int kExitSplit = 4;
constexpr int kExitNumeric = 5;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("READKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric READKIT_SEED\n";
    }
  }
  return kDefaultSeed;
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") return io::read_stream(std::cin);
  return io::read_file(path);
}

int run_score(const std::string& path, const std::string& lang_name,
              std::vector<std::string> formula_names, const std::string& format,
              const std::string& abbrev_path) {
  const auto lang = (lang_name == "english") ? text::Language::English
                                             : text::Language::Turkish;
  const auto rule = (lang == text::Language::English)
                        ? text::HardWordRule::GunningSuffixException
                        : text::HardWordRule::PlainThreeSyllables;

  std::vector<readability::Formula> formulas;
  if (formula_names.empty()) {
    formulas = readability::all_formulas();
  } else {
    for (const auto& name : formula_names) {
      readability::Formula f;
      if (!readability::formula_from_name(name, f)) {
        std::cerr << "unknown formula: " << name << "\n";
        return kExitData;
      }
      formulas.push_back(f);
    }
  }

  const std::string content = read_input(path);
  auto abbrevs = abbrev_path.empty() ? text::default_abbreviations()
                                     : text::load_abbreviations(abbrev_path);
  const auto stats = text::compute_stats(content, lang, rule, abbrevs);

  for (auto f : formulas) {
    const bool english_formula = readability::presumes_english(f);
    const bool english_input = (lang == text::Language::English);
    if (english_formula != english_input) {
      std::cerr << "warning: " << readability::formula_name(f)
                << (english_formula ? " presumes English input\n"
                                    : " presumes Turkish input\n");
    }
  }

  std::vector<readability::ReadabilityScore> scores;
  scores.reserve(formulas.size());
  for (auto f : formulas) scores.push_back(readability::compute(f, stats));

  if (format == "json") {
    json doc;
    doc["language"] = (lang == text::Language::English) ? "english" : "turkish";
    doc["sentences"] = stats.sentence_count;
    doc["words"] = stats.word_count;
    doc["scores"] = json::array();
    for (const auto& s : scores) {
      doc["scores"].push_back({{"formula", readability::formula_name(s.formula)},
                               {"value", s.value},
                               {"level_label", s.level_label},
                               {"level_index", s.level_index}});
    }
    std::cout << doc.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << "formula,value,level_label,level_index\n";
    for (const auto& s : scores) {
      std::cout << readability::formula_name(s.formula) << ',' << io::fmt4(s.value)
                << ',' << io::csv_escape(s.level_label) << ',' << s.level_index
                << '\n';
    }
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %10s  %s\n", "formula", "value", "level");
    std::cout << buf;
    for (const auto& s : scores) {
      std::snprintf(buf, sizeof(buf), "%-16s %10s  %s\n",
                    readability::formula_name(s.formula), io::fmt4(s.value).c_str(),
                    s.level_label.c_str());
      std::cout << buf;
    }
  }
  return 0;
}

json histogram_json(const corpus::YodHistogram& hist,
                    const std::array<double, 16>& weights,
                    const std::map<int, double>& lengths) {
  json doc;
  doc["total"] = hist.total();
  doc["levels"] = json::array();
  for (int lvl = 1; lvl <= 16; ++lvl) {
    json row;
    row["level"] = lvl;
    row["count"] = hist.counts[static_cast<std::size_t>(lvl - 1)];
    row["weight"] = weights[static_cast<std::size_t>(lvl - 1)];
    auto it = lengths.find(lvl);
    if (it != lengths.end()) row["mean_summary_tokens"] = it->second;
    doc["levels"].push_back(row);
  }
  return doc;
}

int run_analyze(const std::string& path, const std::string& format,
                const std::string& out_dir) {
  auto ingest = corpus::ingest(path);
  for (const auto& err : ingest.errors) {
    std::cerr << "line " << err.line << ": " << err.message << "\n";
  }
  if (ingest.records.empty()) {
    std::cerr << "no usable records in " << path << "\n";
    return kExitData;
  }
  const auto hist = corpus::histogram(ingest.records);
  const auto weights = corpus::sampling_weights(hist);
  const auto lengths = corpus::token_length_stats(ingest.records);

  std::ostringstream csv;
  csv << "level,count,weight,mean_summary_tokens\n";
  for (int lvl = 1; lvl <= 16; ++lvl) {
    auto it = lengths.find(lvl);
    csv << lvl << ',' << hist.counts[static_cast<std::size_t>(lvl - 1)] << ','
        << io::fmt4(weights[static_cast<std::size_t>(lvl - 1)]) << ','
        << (it != lengths.end() ? io::fmt4(it->second) : std::string()) << '\n';
  }

  const json doc = histogram_json(hist, weights, lengths);

  if (format == "json") {
    std::cout << doc.dump(2) << "\n";
  } else if (format == "csv") {
    std::cout << csv.str();
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%5s %8s %8s %14s\n", "level", "count", "weight",
                  "mean tokens");
    std::cout << buf;
    for (int lvl = 1; lvl <= 16; ++lvl) {
      auto it = lengths.find(lvl);
      std::snprintf(buf, sizeof(buf), "%5d %8lld %8s %14s\n", lvl,
                    static_cast<long long>(hist.counts[static_cast<std::size_t>(lvl - 1)]),
                    io::fmt4(weights[static_cast<std::size_t>(lvl - 1)]).c_str(),
                    it != lengths.end() ? io::fmt4(it->second).c_str() : "-");
      std::cout << buf;
    }
    std::cout << "total " << hist.total() << "\n";
  }

  if (!out_dir.empty()) {
    io::atomic_write(out_dir + "/corpus_report.json", doc.dump(2) + "\n");
    io::atomic_write(out_dir + "/corpus_report.csv", csv.str());
  }
  return 0;
}

int run_build_splits(const std::string& path, std::int64_t quota, std::uint64_t seed,
                     const std::string& out_dir) {
  auto ingest = corpus::ingest(path);
  for (const auto& err : ingest.errors) {
    std::cerr << "line " << err.line << ": " << err.message << "\n";
  }
  if (ingest.records.empty()) {
    std::cerr << "no usable records in " << path << "\n";
    return kExitData;
  }

  corpus::SplitSpec spec;
  spec.per_level_eval_quota = quota;
  spec.seed = seed;
  const auto splits = corpus::build_splits(ingest.records, spec);

  auto serialize = [](const std::vector<corpus::CorpusRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
      out += corpus::record_to_jsonl_line(rec);
      out += '\n';
    }
    return out;
  };

  const std::string dir = out_dir.empty() ? "." : out_dir;
  io::atomic_write(dir + "/train.jsonl", serialize(splits.train));
  io::atomic_write(dir + "/test.jsonl", serialize(splits.test));
  io::atomic_write(dir + "/validation.jsonl", serialize(splits.validation));

  json manifest;
  manifest["seed"] = seed;
  manifest["quota"] = quota;
  manifest["files"] = {{"train", "train.jsonl"},
                       {"test", "test.jsonl"},
                       {"validation", "validation.jsonl"}};
  auto level_counts = [](const std::vector<corpus::CorpusRecord>& records) {
    auto h = corpus::histogram(records);
    return std::vector<std::int64_t>(h.counts.begin(), h.counts.end());
  };
  manifest["counts"] = {{"train", level_counts(splits.train)},
                        {"test", level_counts(splits.test)},
                        {"validation", level_counts(splits.validation)}};
  manifest["totals"] = {{"train", splits.train.size()},
                        {"test", splits.test.size()},
                        {"validation", splits.validation.size()}};
  io::atomic_write(dir + "/manifest.json", manifest.dump(2) + "\n");

  std::cout << "train " << splits.train.size() << ", test " << splits.test.size()
            << ", validation " << splits.validation.size() << "\n";
  return 0;
}

int run_evaluate(const std::string& path, double tolerance, const std::string& format,
                 const std::string& out_dir) {
  auto loaded = eval::load_pairs(path);
  for (const auto& err : loaded.errors) {
    std::cerr << "line " << err.line << ": " << err.message << "\n";
  }
  const auto report = eval::evaluate_run(loaded.pairs, tolerance);

  if (format == "json") {
    std::cout << eval::render_json(report);
  } else if (format == "csv") {
    std::cout << eval::render_csv(report);
  } else {
    std::cout << eval::render_table(report);
  }

  if (!out_dir.empty()) {
    io::atomic_write(out_dir + "/report.json", eval::render_json(report));
    io::atomic_write(out_dir + "/report.csv", eval::render_csv(report));
    io::atomic_write(out_dir + "/report.txt", eval::render_table(report));
  }
  return 0;
}

struct TrainToyFlags {
  std::string corpus_path;
  std::string out_dir = ".";
  int d_model = 64;
  int layers = 2;
  int heads = 2;
  int ffn_dim = 128;
  std::vector<int> head_dims = {512, 256, 128};
  double dropout = 0.1;
  double lr = 1e-5;
  int warmup = 50;
  int epochs = 11;
  int batch_size = 8;
  std::uint64_t seed = kDefaultSeed;
  int max_src_tokens = 48;
  int max_tgt_tokens = 24;
};

int run_train_toy(const TrainToyFlags& flags) {
  auto ingest = corpus::ingest(flags.corpus_path);
  for (const auto& err : ingest.errors) {
    std::cerr << "line " << err.line << ": " << err.message << "\n";
  }
  if (ingest.records.empty()) {
    std::cerr << "no usable records in " << flags.corpus_path << "\n";
    return kExitData;
  }

  std::vector<std::string> texts;
  for (const auto& rec : ingest.records) {
    texts.push_back(rec.summary);
    if (!rec.source_text.empty()) texts.push_back(rec.source_text);
  }
  const auto vocab = nn::ControlVocab::build(texts);

  std::vector<nn::TrainExample> examples;
  for (const auto& rec : ingest.records) {
    const std::string& source = rec.source_text.empty() ? rec.summary : rec.source_text;
    auto src = vocab.encode(source);
    if (static_cast<int>(src.size()) > flags.max_src_tokens) {
      src.resize(static_cast<std::size_t>(flags.max_src_tokens));
    }
    auto tgt = vocab.encode(rec.summary);
    if (static_cast<int>(tgt.size()) > flags.max_tgt_tokens) {
      tgt.resize(static_cast<std::size_t>(flags.max_tgt_tokens));
    }
    if (tgt.empty()) continue;
    nn::TrainExample ex;
    ex.src_ids = nn::prepend_control_token(src, rec.yod_level, vocab);
    ex.tgt_ids = std::move(tgt);
    ex.level = rec.yod_level;
    examples.push_back(std::move(ex));
  }
  if (examples.empty()) {
    std::cerr << "no trainable examples after tokenization\n";
    return kExitData;
  }

  std::vector<corpus::CorpusRecord> kept;
  for (const auto& ex : examples) {
    corpus::CorpusRecord r;
    r.yod_level = ex.level;
    kept.push_back(r);
  }
  const auto weights = corpus::sampling_weights(corpus::histogram(kept));

  nn::ModelConfig mcfg;
  mcfg.vocab_size = vocab.size();
  mcfg.d_model = flags.d_model;
  mcfg.encoder_layers = flags.layers;
  mcfg.decoder_layers = flags.layers;
  mcfg.heads = flags.heads;
  mcfg.ffn_dim = flags.ffn_dim;
  if (flags.head_dims.size() != 3) throw Error("--head-dims needs three values");
  mcfg.head_hidden = {flags.head_dims[0], flags.head_dims[1], flags.head_dims[2]};
  mcfg.dropout = flags.dropout;
  mcfg.seed = flags.seed;
  mcfg.max_positions =
      std::max(flags.max_src_tokens, flags.max_tgt_tokens) + 8;
  nn::Model model(mcfg);

  nn::TrainConfig tcfg;
  tcfg.learning_rate = flags.lr;
  tcfg.warmup_steps = flags.warmup;
  tcfg.epochs = flags.epochs;
  tcfg.batch_size = flags.batch_size;
  tcfg.seed = flags.seed;

  std::ostringstream log;
  auto result = nn::run_training(model, examples, weights, tcfg,
                                 [&](const nn::StepStats& s) {
                                   log << nn::step_stats_to_json_line(s) << '\n';
                                 });

  io::atomic_write(flags.out_dir + "/train_log.jsonl", log.str());
  model.save(flags.out_dir + "/checkpoint.json", vocab);

  const auto& first = result.steps.front().loss;
  const auto& last = result.steps.back().loss;
  std::cout << "steps " << result.steps.size() << ", initial total "
            << io::fmt4(first.total) << ", final total " << io::fmt4(last.total)
            << "\n";
  return 0;
}

int run_gradcheck(double epsilon, double threshold, std::uint64_t seed,
                  bool inject_bug) {
  nn::ModelConfig cfg;
  cfg.vocab_size = nn::ControlVocab::specials_only().size();
  cfg.d_model = 32;
  cfg.encoder_layers = 2;
  cfg.decoder_layers = 2;
  cfg.heads = 2;
  cfg.ffn_dim = 64;
  cfg.head_hidden = {128, 64, 32};
  cfg.dropout = 0.0;
  cfg.seed = seed;
  cfg.max_positions = 32;
  nn::Model model(cfg);

  const auto vocab = nn::ControlVocab::specials_only();
  std::vector<nn::TrainExample> batch;
  const std::array<int, 4> levels = {1, 6, 11, 16};
  std::uint64_t state = seed ^ 0x9E37'79B9'7F4A'7C15ULL;
  for (int level : levels) {
    nn::TrainExample ex;
    std::vector<int> src;
    for (int k = 0; k < 5; ++k) {
      src.push_back(static_cast<int>(nn::splitmix64(state) %
                                     static_cast<std::uint64_t>(cfg.vocab_size)));
    }
    ex.src_ids = nn::prepend_control_token(src, level, vocab);
    for (int k = 0; k < 4; ++k) {
      ex.tgt_ids.push_back(static_cast<int>(nn::splitmix64(state) %
                                            static_cast<std::uint64_t>(cfg.vocab_size)));
    }
    ex.level = level;
    batch.push_back(std::move(ex));
  }

  nn::GradCheckConfig gcfg;
  gcfg.epsilon = epsilon;
  gcfg.seed = seed;
  gcfg.corrupt_head_sign = inject_bug;
  const auto result = nn::gradient_check(model, batch, gcfg);
  if (!std::isfinite(result.max_rel_error)) {
    std::cerr << "non-finite gradient comparison\n";
    return kExitNumeric;
  }
  std::cout << "max relative error " << result.max_rel_error << " over "
            << result.coords_checked << " coordinates (worst: " << result.worst_param
            << ")\n";
  return result.max_rel_error <= threshold ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turkish readability toolkit"};
  app.require_subcommand(1);
  const std::uint64_t seed_default = default_seed();

  // score
  auto* score = app.add_subcommand("score", "Score a document with readability formulas");
  std::string score_path;
  std::string score_lang = "turkish";
  std::vector<std::string> score_formulas;
  std::string score_format = "table";
  std::string score_abbrev;
  score->add_option("path", score_path, "Input file ('-' or omit for stdin)");
  score->add_option("--lang", score_lang, "Input language")
      ->check(CLI::IsMember({"turkish", "english"}));
  score->add_option("--formulas", score_formulas,
                    "Comma-separated formula names (default: all)")
      ->delimiter(',');
  score->add_option("--format", score_format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  score->add_option("--abbrev", score_abbrev, "Abbreviation list file");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Corpus histogram, weights, lengths");
  std::string analyze_path;
  std::string analyze_format = "table";
  std::string analyze_out;
  analyze->add_option("corpus", analyze_path, "Corpus JSONL")->required();
  analyze->add_option("--format", analyze_format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  analyze->add_option("--out-dir", analyze_out, "Write JSON and CSV reports here");

  // build-splits
  auto* build = app.add_subcommand("build-splits", "Balanced train/test/validation split");
  std::string build_path;
  std::int64_t build_quota = 20;
  std::uint64_t build_seed = seed_default;
  std::string build_out = ".";
  build->add_option("corpus", build_path, "Corpus JSONL")->required();
  build->add_option("--quota", build_quota, "Eval records per level per split");
  build->add_option("--seed", build_seed, "Shuffle seed");
  build->add_option("--out-dir", build_out, "Output directory");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a prediction run");
  std::string eval_path;
  double eval_tolerance = 1.5;
  std::string eval_format = "table";
  std::string eval_out;
  evaluate->add_option("predictions", eval_path, "Predictions JSONL")->required();
  evaluate->add_option("--tolerance", eval_tolerance, "Success tolerance in levels");
  evaluate->add_option("--format", eval_format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  evaluate->add_option("--out-dir", eval_out, "Write report files here");

  // train-toy
  auto* train = app.add_subcommand("train-toy", "Train the toy summarizer");
  TrainToyFlags tf;
  tf.seed = seed_default;
  train->add_option("corpus", tf.corpus_path, "Corpus JSONL")->required();
  train->add_option("--out-dir", tf.out_dir, "Output directory");
  train->add_option("--d-model", tf.d_model, "Hidden width");
  train->add_option("--layers", tf.layers, "Encoder and decoder layer count");
  train->add_option("--heads", tf.heads, "Attention heads");
  train->add_option("--ffn", tf.ffn_dim, "Feed-forward width");
  train->add_option("--head-dims", tf.head_dims, "Three hidden widths for the heads")
      ->delimiter(',');
  train->add_option("--dropout", tf.dropout, "Dropout rate");
  train->add_option("--lr", tf.lr, "Peak learning rate");
  train->add_option("--warmup", tf.warmup, "Warmup steps");
  train->add_option("--epochs", tf.epochs, "Epochs");
  train->add_option("--batch-size", tf.batch_size, "Batch size");
  train->add_option("--seed", tf.seed, "Seed");
  train->add_option("--max-src", tf.max_src_tokens, "Max source tokens");
  train->add_option("--max-tgt", tf.max_tgt_tokens, "Max summary tokens");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  double gc_epsilon = 1e-5;
  double gc_threshold = 1e-4;
  std::uint64_t gc_seed = seed_default;
  bool gc_inject = false;
  gradcheck->add_option("--epsilon", gc_epsilon, "Finite-difference step");
  gradcheck->add_option("--threshold", gc_threshold, "Max allowed relative error");
  gradcheck->add_option("--seed", gc_seed, "Seed");
  gradcheck->add_flag("--inject-bug", gc_inject,
                      "Flip regression-head gradients to prove detection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*score) {
      return run_score(score_path, score_lang, score_formulas, score_format,
                       score_abbrev);
    }
    if (*analyze) return run_analyze(analyze_path, analyze_format, analyze_out);
    if (*build) return run_build_splits(build_path, build_quota, build_seed, build_out);
    if (*evaluate) return run_evaluate(eval_path, eval_tolerance, eval_format, eval_out);
    if (*train) return run_train_toy(tf);
    if (*gradcheck) return run_gradcheck(gc_epsilon, gc_threshold, gc_seed, gc_inject);
  } catch (const FileError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const InsufficientLevelError& e) {
    std::cerr << e.what() << "\n";
    return kExitSplit;
  } catch (const NonFiniteLossError& e) {
    std::cerr << e.what() << "\n";
    return kExitNumeric;
  } catch (const EmptyTextError& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const NoWordsError& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const EmptyRunError& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
