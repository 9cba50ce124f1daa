#include "readkit/readability.hpp"

#include <algorithm>
#include <cmath>

namespace readkit::readability {

namespace {

struct Band {
  double lower;  // inclusive lower bound of the band
  const char* label;
};

// Bands are listed highest score first; lookup picks the first band whose
// lower bound does not exceed the value, so a value sitting on a printed
// boundary resolves to the higher band.

// Flesch reading ease interpretation (Flesch 1948), domain [0, 100].
constexpr Band kFresBands[] = {
    {90.0, "5th grade"},          {80.0, "6th grade"},
    {70.0, "7th grade"},          {60.0, "8th & 9th grade"},
    {50.0, "10th to 12th grade"}, {30.0, "College"},
    {10.0, "College graduate"},   {0.0, "Professional"},
};

// Gunning fog grades 6..17 (Gunning 1952); value is rounded to the nearest
// row and clamped.
constexpr const char* kGfiLabels[] = {
    "Sixth grade",          "Seventh grade",      "Eighth grade",
    "High school freshman", "High school sophomore", "High school junior",
    "High school senior",   "College freshman",   "College sophomore",
    "College junior",       "College senior",     "College graduate",
};

// SMOG education bands (McLaughlin 1969).
constexpr Band kSmogBands[] = {
    {17.0, "Graduate"},
    {13.0, "Undergraduate"},
    {9.0, "High School"},
    {5.0, "Middle School"},
    {-1e300, "Elementary School"},
};

// ARI grade rows 1..14 (Senter & Smith 1967); value is rounded up and clamped.
constexpr const char* kAriLabels[] = {
    "Kindergarten", "First Grade",  "Second Grade",   "Third Grade",
    "Fourth Grade", "Fifth Grade",  "Sixth Grade",    "Seventh Grade",
    "Eighth Grade", "Ninth Grade",  "Tenth Grade",    "Eleventh Grade",
    "Twelfth Grade", "College Student",
};

// Ateşman difficulty bands (Ateşman 1997), domain [1, 100].
constexpr Band kAtesmanBands[] = {
    {90.0, "Very Easy"},
    {70.0, "Easy"},
    {50.0, "Moderately Difficult"},
    {30.0, "Difficult"},
    {1.0, "Very Difficult"},
};

// Çetinkaya-Uzun reading levels (Çetinkaya 2010), domain [0, inf).
constexpr Band kCetinkayaBands[] = {
    {51.0, "Independent Reading Level"},
    {35.0, "Educational Reading Level"},
    {0.0, "Insufficient Reading Level"},
};

// Bezirci-Yılmaz education bands (Bezirci & Yılmaz 2010). The printed table
// starts at 1 but a zero score (no polysyllabic words) reports as elementary.
constexpr Band kYodBands[] = {
    {16.0, "Academic/Professional Level"},
    {13.0, "Undergraduate Level"},
    {9.0, "High School"},
    {0.0, "Elementary School"},
};

template <size_t N>
LevelMapping band_lookup(const Band (&bands)[N], double v) {
  for (size_t i = 0; i < N; ++i) {
    if (v >= bands[i].lower) {
      // Row indices follow the printed top-to-bottom order; bands here are
      // highest-first for FRES/Ateşman which are printed that way, so the
      // array position is already the printed row.
      return {bands[i].label, static_cast<int>(i)};
    }
  }
  return {kOutOfRangeLabel, -1};
}

LevelMapping out_of_range() { return {kOutOfRangeLabel, -1}; }

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

LevelMapping map_level(Formula f, double value) {
  switch (f) {
    case Formula::Fres:
      if (value < 0.0 || value > 100.0) return out_of_range();
      return band_lookup(kFresBands, value);
    case Formula::Gfi: {
      int grade = std::clamp(round_half_up(value), 6, 17);
      return {kGfiLabels[grade - 6], grade - 6};
    }
    case Formula::Smog: {
      LevelMapping m = band_lookup(kSmogBands, value);
      // Re-index so 0 is the easiest row, as printed.
      m.index = 4 - m.index;
      return m;
    }
    case Formula::Ari: {
      int grade = std::clamp(static_cast<int>(std::ceil(value)), 1, 14);
      return {kAriLabels[grade - 1], grade - 1};
    }
    case Formula::Atesman:
      if (value < 1.0 || value > 100.0) return out_of_range();
      return band_lookup(kAtesmanBands, value);
    case Formula::CetinkayaUzun: {
      if (value < 0.0) return out_of_range();
      LevelMapping m = band_lookup(kCetinkayaBands, value);
      m.index = 2 - m.index;  // printed order is insufficient-first
      return m;
    }
    case Formula::Yod: {
      if (value < 0.0) return out_of_range();
      LevelMapping m = band_lookup(kYodBands, value);
      m.index = 3 - m.index;  // printed order is elementary-first
      return m;
    }
  }
  return out_of_range();
}

namespace {

ReadabilityScore make_score(Formula f, double value) {
  LevelMapping m = map_level(f, value);
  return {f, value, std::move(m.label), m.index};
}

}  // namespace

ReadabilityScore fres(const text::TextStats& s) {
  return make_score(Formula::Fres, 206.835 - 1.015 * s.asl - 84.6 * s.asw);
}

ReadabilityScore gunning_fog(const text::TextStats& s) {
  return make_score(Formula::Gfi, 0.4 * (s.asl + 100.0 * s.phw));
}

ReadabilityScore smog(const text::TextStats& s) {
  double pc = static_cast<double>(s.polysyllable_count);
  double sc = static_cast<double>(s.sentence_count);
  return make_score(Formula::Smog, 1.0430 * std::sqrt(pc * 30.0 / sc) + 3.1291);
}

ReadabilityScore ari(const text::TextStats& s) {
  return make_score(Formula::Ari, 4.71 * s.awl_chars + 0.5 * s.asl - 21.43);
}

ReadabilityScore atesman(const text::TextStats& s) {
  return make_score(Formula::Atesman, 198.825 - 40.175 * s.asw - 2.610 * s.asl);
}

ReadabilityScore cetinkaya_uzun(const text::TextStats& s) {
  return make_score(Formula::CetinkayaUzun,
                    118.823 - 25.987 * s.awl_syllables - 0.971 * s.asl);
}

ReadabilityScore yod(const text::TextStats& s) {
  double weighted = 0.84 * s.h3 + 1.5 * s.h4 + 3.5 * s.h5 + 26.25 * s.h6;
  return make_score(Formula::Yod, std::sqrt(s.asl * weighted));
}

ReadabilityScore compute(Formula f, const text::TextStats& stats) {
  switch (f) {
    case Formula::Fres: return fres(stats);
    case Formula::Gfi: return gunning_fog(stats);
    case Formula::Smog: return smog(stats);
    case Formula::Ari: return ari(stats);
    case Formula::Atesman: return atesman(stats);
    case Formula::CetinkayaUzun: return cetinkaya_uzun(stats);
    case Formula::Yod: return yod(stats);
  }
  return yod(stats);
}

YodLevel yod_to_level(double value) {
  return {std::clamp(round_half_up(value), 1, 16)};
}

bool yod_success(double achieved, YodLevel target, double tolerance) {
  return std::fabs(achieved - static_cast<double>(target.level)) <= tolerance;
}

const char* formula_name(Formula f) {
  switch (f) {
    case Formula::Fres: return "fres";
    case Formula::Gfi: return "gfi";
    case Formula::Smog: return "smog";
    case Formula::Ari: return "ari";
    case Formula::Atesman: return "atesman";
    case Formula::CetinkayaUzun: return "cetinkaya_uzun";
    case Formula::Yod: return "yod";
  }
  return "?";
}

bool formula_from_name(const std::string& name, Formula& out) {
  for (Formula f : all_formulas()) {
    if (name == formula_name(f)) {
      out = f;
      return true;
    }
  }
  return false;
}

const std::vector<Formula>& all_formulas() {
  static const std::vector<Formula> kAll = {
      Formula::Fres, Formula::Gfi,      Formula::Smog, Formula::Ari,
      Formula::Atesman, Formula::CetinkayaUzun, Formula::Yod,
  };
  return kAll;
}

bool presumes_english(Formula f) {
  return f == Formula::Fres || f == Formula::Gfi || f == Formula::Smog ||
         f == Formula::Ari;
}

}  // namespace readkit::readability
