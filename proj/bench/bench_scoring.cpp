#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "readkit/corpus.hpp"
#include "readkit/eval.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace readkit;

double now_seconds() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
#endif
}

// Deterministic pseudo-Turkish filler so both paths chew on identical input.
std::string synth_sentence(std::uint64_t i) {
  static const char* words[] = {"kitap",      "okul",     "bilgisayar", "araştırma",
                                "üniversite", "öğrenci",  "kalem",      "pencere",
                                "matematik",  "deneyler", "sonuç",      "gelişme"};
  std::string s;
  const int len = 6 + static_cast<int>(i % 7);
  for (int w = 0; w < len; ++w) {
    if (w) s += ' ';
    s += words[(i * 31 + static_cast<std::uint64_t>(w) * 7) % 12];
  }
  s += '.';
  return s;
}

std::string synth_text(std::uint64_t i, int sentences) {
  std::string text;
  for (int s = 0; s < sentences; ++s) {
    if (s) text += ' ';
    text += synth_sentence(i * 13 + static_cast<std::uint64_t>(s));
  }
  return text;
}

template <typename Fn>
double time_best_of(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double t0 = now_seconds();
    fn();
    const double t1 = now_seconds();
    if (t1 - t0 < best) best = t1 - t0;
  }
  return best;
}

}  // namespace

int main() {
  constexpr int kDocs = 2000;
  constexpr int kPairs = 600;

  std::vector<std::string> summaries;
  summaries.reserve(kDocs);
  for (int i = 0; i < kDocs; ++i) {
    summaries.push_back(synth_text(static_cast<std::uint64_t>(i), 4));
  }

  std::vector<eval::EvalPair> pairs;
  pairs.reserve(kPairs);
  for (int i = 0; i < kPairs; ++i) {
    eval::EvalPair p;
    p.id = std::to_string(i);
    p.candidate = synth_text(static_cast<std::uint64_t>(i), 3);
    p.reference = synth_text(static_cast<std::uint64_t>(i + 1), 3);
    p.target_level = 1 + (i % 16);
    pairs.push_back(std::move(p));
  }

#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp not available, parallel path runs serially\n");
#endif

  const double yod_serial = time_best_of(3, [&] {
    corpus::compute_yod_levels(summaries, Exec::Serial);
  });
  const double yod_parallel = time_best_of(3, [&] {
    corpus::compute_yod_levels(summaries, Exec::Parallel);
  });

  const auto serial_levels = corpus::compute_yod_levels(summaries, Exec::Serial);
  const auto parallel_levels = corpus::compute_yod_levels(summaries, Exec::Parallel);
  const bool yod_match = serial_levels == parallel_levels;

  const double pair_serial = time_best_of(3, [&] {
    eval::score_pairs(pairs, Exec::Serial);
  });
  const double pair_parallel = time_best_of(3, [&] {
    eval::score_pairs(pairs, Exec::Parallel);
  });

  std::printf("yod levels over %d docs: serial %.4fs, parallel %.4fs, speedup %.2fx, identical %s\n",
              kDocs, yod_serial, yod_parallel, yod_serial / yod_parallel,
              yod_match ? "yes" : "NO");
  std::printf("metric scoring over %d pairs: serial %.4fs, parallel %.4fs, speedup %.2fx\n",
              kPairs, pair_serial, pair_parallel, pair_serial / pair_parallel);
  return yod_match ? 0 : 1;
}
