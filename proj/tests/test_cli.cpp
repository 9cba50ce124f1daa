#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

// Runs the installed binary through the shell so stdout/stderr land in files.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path dir = "cli_io";
  fs::create_directories(dir);
  const fs::path out_path = dir / ("out_" + std::to_string(counter) + ".txt");
  const fs::path err_path = dir / ("err_" + std::to_string(counter) + ".txt");
  ++counter;

  const std::string cmd = env_prefix + std::string(READKIT_CLI_PATH) + " " + args +
                          " > " + out_path.string() + " 2> " + err_path.string();
  const int raw = std::system(cmd.c_str());
  REQUIRE(raw != -1);
  REQUIRE(WIFEXITED(raw));

  CliResult r;
  r.code = WEXITSTATUS(raw);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string corpus_line(const std::string& id, int level, const std::string& words) {
  json j;
  j["id"] = id;
  j["summary"] = words;
  j["yod"] = level;
  return j.dump() + "\n";
}

std::string pair_line(const std::string& id, int target, const std::string& cand,
                      const std::string& ref) {
  json j;
  j["id"] = id;
  j["target_yod"] = target;
  j["candidate"] = cand;
  j["reference"] = ref;
  return j.dump() + "\n";
}

}  // namespace

TEST_CASE("score emits json with value and band") {
  fs::create_directories("cli_fixtures");
  spit("cli_fixtures/simple.txt", "Bu ve şu.");

  auto r = run_cli("score cli_fixtures/simple.txt --formulas yod --format json");
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["language"] == "turkish");
  CHECK(doc["sentences"].get<int>() == 1);
  CHECK(doc["words"].get<int>() == 3);
  REQUIRE(doc["scores"].size() == 1);
  CHECK(doc["scores"][0]["formula"] == "yod");
  CHECK(doc["scores"][0]["value"].get<double>() == 0.0);
  CHECK(doc["scores"][0]["level_label"] == "Elementary School");
}

TEST_CASE("score covers all formulas by default and csv has a header") {
  fs::create_directories("cli_fixtures");
  spit("cli_fixtures/longer.txt", "Okunabilirlik ölçümü burada başlar. Sonra biter.");

  auto r = run_cli("score cli_fixtures/longer.txt --format csv");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "formula,value,level_label,level_index");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 7);
}

TEST_CASE("score warns when a formula presumes the other language") {
  fs::create_directories("cli_fixtures");
  spit("cli_fixtures/simple2.txt", "Bu ve şu.");

  auto r = run_cli("score cli_fixtures/simple2.txt --formulas fres");
  CHECK(r.code == 0);
  CHECK(r.err.find("presumes English input") != std::string::npos);

  auto clean = run_cli("score cli_fixtures/simple2.txt --formulas yod");
  CHECK(clean.err.empty());
}

TEST_CASE("score exit codes for io and data failures") {
  auto missing = run_cli("score cli_fixtures/does_not_exist.txt --formulas yod");
  CHECK(missing.code == 2);

  fs::create_directories("cli_fixtures");
  spit("cli_fixtures/empty.txt", "");
  auto empty = run_cli("score cli_fixtures/empty.txt --formulas yod");
  CHECK(empty.code == 3);

  spit("cli_fixtures/nowords.txt", "42 — 17.");
  auto nowords = run_cli("score cli_fixtures/nowords.txt --formulas yod");
  CHECK(nowords.code == 3);

  auto bogus = run_cli("score cli_fixtures/simple.txt --formulas bogus");
  CHECK(bogus.code == 3);
  CHECK(bogus.err.find("unknown formula: bogus") != std::string::npos);
}

TEST_CASE("analyze reports histogram rows") {
  fs::create_directories("cli_fixtures");
  std::string corpus;
  corpus += corpus_line("a1", 2, "Kısa özet bir.");
  corpus += corpus_line("a2", 2, "Kısa özet iki.");
  corpus += corpus_line("a3", 7, "Uzun özet burada.");
  spit("cli_fixtures/analyze.jsonl", corpus);

  auto r = run_cli("analyze cli_fixtures/analyze.jsonl --format json");
  REQUIRE(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["total"].get<int>() == 3);
  REQUIRE(doc["levels"].size() == 16);
  CHECK(doc["levels"][1]["count"].get<int>() == 2);
  CHECK(doc["levels"][6]["count"].get<int>() == 1);
  CHECK(doc["levels"][0]["count"].get<int>() == 0);
}

TEST_CASE("build-splits writes three jsonl files and a manifest") {
  const fs::path dir = "cli_splits";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::string corpus;
  for (int level : {3, 5, 9, 14}) {
    for (int i = 0; i < 4; ++i) {
      corpus += corpus_line("r" + std::to_string(level) + "_" + std::to_string(i),
                            level, "Seviye özeti numara " + std::to_string(i) + ".");
    }
  }
  spit(dir / "corpus.jsonl", corpus);

  auto r = run_cli("build-splits " + (dir / "corpus.jsonl").string() +
                   " --quota 1 --seed 11 --out-dir " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("train 8, test 4, validation 4") != std::string::npos);

  for (const char* name : {"train.jsonl", "test.jsonl", "validation.jsonl"}) {
    CHECK(fs::exists(dir / name));
  }
  auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["seed"].get<std::uint64_t>() == 11);
  CHECK(manifest["quota"].get<int>() == 1);
  CHECK(manifest["files"]["train"] == "train.jsonl");
  REQUIRE(manifest["counts"]["test"].size() == 16);
  CHECK(manifest["counts"]["test"][2].get<int>() == 1);   // level 3
  CHECK(manifest["counts"]["train"][2].get<int>() == 2);
  CHECK(manifest["totals"]["train"].get<int>() == 8);
  CHECK(manifest["totals"]["validation"].get<int>() == 4);

  // Every record lands in exactly one split.
  int lines = 0;
  for (const char* name : {"train.jsonl", "test.jsonl", "validation.jsonl"}) {
    std::istringstream in(slurp(dir / name));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) ++lines;
    }
  }
  CHECK(lines == 16);
}

TEST_CASE("build-splits is deterministic and READKIT_SEED matches --seed") {
  const fs::path dir_a = "cli_splits_a";
  const fs::path dir_b = "cli_splits_b";
  const fs::path dir_c = "cli_splits_c";
  for (const auto& d : {dir_a, dir_b, dir_c}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }

  std::string corpus;
  for (int i = 0; i < 8; ++i) {
    corpus += corpus_line("x" + std::to_string(i), 4,
                          "Aynı seviye özeti " + std::to_string(i) + ".");
  }
  spit(dir_a / "corpus.jsonl", corpus);

  const std::string input = (dir_a / "corpus.jsonl").string();
  auto a = run_cli("build-splits " + input + " --quota 2 --seed 123 --out-dir " +
                   dir_a.string());
  auto b = run_cli("build-splits " + input + " --quota 2 --seed 123 --out-dir " +
                   dir_b.string());
  auto c = run_cli("build-splits " + input + " --quota 2 --out-dir " + dir_c.string(),
                   "READKIT_SEED=123 ");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  REQUIRE(c.code == 0);

  for (const char* name : {"train.jsonl", "test.jsonl", "validation.jsonl",
                           "manifest.json"}) {
    const auto bytes = slurp(dir_a / name);
    CHECK(bytes == slurp(dir_b / name));
    CHECK(bytes == slurp(dir_c / name));
  }
}

TEST_CASE("build-splits refuses a deficient level without partial output") {
  const fs::path dir = "cli_splits_deficient";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::string corpus;
  for (int i = 0; i < 3; ++i) {
    corpus += corpus_line("d" + std::to_string(i), 2, "Eksik seviye " +
                          std::to_string(i) + ".");
  }
  spit(dir / "corpus.jsonl", corpus);

  auto r = run_cli("build-splits " + (dir / "corpus.jsonl").string() +
                   " --quota 2 --out-dir " + dir.string());
  CHECK(r.code == 4);
  CHECK(r.err.find("level 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "train.jsonl"));
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
  for (const auto& entry : fs::directory_iterator(dir)) {
    CHECK(entry.path().extension() != ".tmp");
  }
}

TEST_CASE("evaluate renders all three formats") {
  fs::create_directories("cli_fixtures");
  std::string run;
  run += pair_line("p1", 3, "Bu bir özet.", "Bu bir özet.");
  run += pair_line("p2", 12, "Farklı bir metin.", "Bambaşka bir şey.");
  spit("cli_fixtures/run.jsonl", run);

  auto table = run_cli("evaluate cli_fixtures/run.jsonl");
  REQUIRE(table.code == 0);
  CHECK(table.out.find("overall") != std::string::npos);

  auto csv = run_cli("evaluate cli_fixtures/run.jsonl --format csv");
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "section,label,count,rouge1,rouge2,rougeL,meteor,bleu,success_rate");

  auto js = run_cli("evaluate cli_fixtures/run.jsonl --format json --tolerance 2.0");
  REQUIRE(js.code == 0);
  auto doc = json::parse(js.out);
  CHECK(doc["tolerance"].get<double>() == 2.0);
  REQUIRE(doc["per_level"].size() == 16);
  REQUIRE(doc["per_group"].size() == 4);
  CHECK(doc["overall"]["count"].get<int>() == 2);

  const fs::path out_dir = "cli_eval_out";
  fs::remove_all(out_dir);
  fs::create_directories(out_dir);
  auto with_files = run_cli("evaluate cli_fixtures/run.jsonl --out-dir " +
                            out_dir.string());
  REQUIRE(with_files.code == 0);
  for (const char* name : {"report.json", "report.csv", "report.txt"}) {
    CHECK(fs::exists(out_dir / name));
  }
}

TEST_CASE("evaluate exit codes for missing and empty runs") {
  auto missing = run_cli("evaluate cli_fixtures/no_such_run.jsonl");
  CHECK(missing.code == 2);

  fs::create_directories("cli_fixtures");
  spit("cli_fixtures/empty_run.jsonl", "");
  auto empty = run_cli("evaluate cli_fixtures/empty_run.jsonl");
  CHECK(empty.code == 3);
}

TEST_CASE("train-toy writes a log and checkpoint deterministically") {
  const fs::path dir_a = "cli_toy_a";
  const fs::path dir_b = "cli_toy_b";
  for (const auto& d : {dir_a, dir_b}) {
    fs::remove_all(d);
    fs::create_directories(d);
  }

  std::string corpus;
  corpus += corpus_line("t1", 1, "Kedi geldi.");
  corpus += corpus_line("t2", 3, "Köpek koştu gitti.");
  corpus += corpus_line("t3", 5, "Kuş uçtu yuvaya döndü.");
  corpus += corpus_line("t4", 8, "Balık yüzdü denizde kayboldu sonra.");
  spit(dir_a / "corpus.jsonl", corpus);

  const std::string flags =
      " --d-model 16 --layers 1 --heads 2 --ffn 32 --head-dims 16,8,4"
      " --dropout 0 --lr 0.001 --warmup 2 --epochs 2 --batch-size 2"
      " --seed 7 --max-src 12 --max-tgt 8";
  const std::string input = (dir_a / "corpus.jsonl").string();

  auto a = run_cli("train-toy " + input + flags + " --out-dir " + dir_a.string());
  REQUIRE(a.code == 0);
  CHECK(a.out.find("steps 4, initial total ") != std::string::npos);

  REQUIRE(fs::exists(dir_a / "train_log.jsonl"));
  REQUIRE(fs::exists(dir_a / "checkpoint.json"));

  std::istringstream log(slurp(dir_a / "train_log.jsonl"));
  int steps = 0;
  for (std::string line; std::getline(log, line);) {
    if (line.empty()) continue;
    auto rec = json::parse(line);
    CHECK(rec["step"].get<int>() == steps);
    CHECK(std::isfinite(rec["total"].get<double>()));
    ++steps;
  }
  CHECK(steps == 4);

  auto ckpt = json::parse(slurp(dir_a / "checkpoint.json"));
  CHECK(ckpt.contains("config"));
  CHECK(ckpt.contains("params"));
  CHECK(ckpt.contains("vocab"));

  auto b = run_cli("train-toy " + input + flags + " --out-dir " + dir_b.string());
  REQUIRE(b.code == 0);
  CHECK(slurp(dir_a / "train_log.jsonl") == slurp(dir_b / "train_log.jsonl"));
  CHECK(slurp(dir_a / "checkpoint.json") == slurp(dir_b / "checkpoint.json"));
}

TEST_CASE("gradcheck passes clean and fails with the injected bug") {
  auto clean = run_cli("gradcheck --seed 3");
  REQUIRE(clean.code == 0);
  CHECK(clean.out.find("max relative error") != std::string::npos);
  CHECK(clean.out.find("coordinates") != std::string::npos);

  auto buggy = run_cli("gradcheck --seed 3 --inject-bug");
  CHECK(buggy.code == 1);
}
