#pragma once

#include <string>
#include <vector>

#include "readkit/text_core.hpp"

namespace readkit::readability {

enum class Formula { Fres, Gfi, Smog, Ari, Atesman, CetinkayaUzun, Yod };

// Raw formula value plus its position in the formula's interpretation table.
// level_index is the 0-based row of the embedded table (see readability.cpp
// for each table's row order); -1 with the "out of table range" label when
// the value falls outside the table's printed domain.
struct ReadabilityScore {
  Formula formula;
  double value = 0.0;
  std::string level_label;
  int level_index = -1;
};

struct YodLevel {
  int level = 1;  // [1,16]
};

struct LevelMapping {
  std::string label;
  int index = -1;
};

inline constexpr const char* kOutOfRangeLabel = "out of table range";

// Score-to-band lookup for a raw formula value. Total: every real value maps
// to exactly one label (possibly the out-of-range label). On shared printed
// boundaries the band holding higher scores wins.
LevelMapping map_level(Formula f, double value);

// Flesch reading ease: 206.835 - 1.015*ASL - 84.6*ASW (expects English stats).
ReadabilityScore fres(const text::TextStats& stats);
// Gunning fog index: 0.4 * (ASL + 100*PHW) (expects the Gunning hard-word rule).
ReadabilityScore gunning_fog(const text::TextStats& stats);
// SMOG: 1.0430 * sqrt(PC * 30/SC) + 3.1291.
ReadabilityScore smog(const text::TextStats& stats);
// Automated readability index: 4.71*AWL_chars + 0.5*ASL - 21.43.
ReadabilityScore ari(const text::TextStats& stats);
// Ateşman: 198.825 - 40.175*ASW - 2.610*ASL (Turkish).
ReadabilityScore atesman(const text::TextStats& stats);
// Çetinkaya-Uzun: 118.823 - 25.987*AWL - 0.971*ASL, with AWL read as
// syllables per word (Turkish).
ReadabilityScore cetinkaya_uzun(const text::TextStats& stats);
// Bezirci-Yılmaz YOD:
// sqrt(OKS * (0.84*H3 + 1.5*H4 + 3.5*H5 + 26.25*H6)) (Turkish).
ReadabilityScore yod(const text::TextStats& stats);

ReadabilityScore compute(Formula f, const text::TextStats& stats);

// Continuous YOD to the integer level used for conditioning and corpora:
// round half up, clamped to [1,16].
YodLevel yod_to_level(double value);

// Target-hit predicate: |achieved - target| <= tolerance.
bool yod_success(double achieved, YodLevel target, double tolerance = 1.5);

const char* formula_name(Formula f);
// Parses "fres", "gfi", "smog", "ari", "atesman", "cetinkaya_uzun", "yod".
bool formula_from_name(const std::string& name, Formula& out);
const std::vector<Formula>& all_formulas();
// True for the formulas defined over English text statistics.
bool presumes_english(Formula f);

}  // namespace readkit::readability
