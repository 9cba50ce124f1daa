#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "readkit/common.hpp"

namespace readkit::text {

enum class Language { Turkish, English };

// How words of >= 3 syllables enter the hard-word proportion. The Gunning
// variant drops words whose third syllable exists only because of an
// "-ed"/"-es" suffix; it applies in English mode only.
enum class HardWordRule { PlainThreeSyllables, GunningSuffixException };

struct WordToken {
  std::string surface;      // UTF-8, outer punctuation stripped, case preserved
  int char_count = 0;       // alphabetic characters in surface
  int syllable_count = 0;   // per the language's counter
};

// Per-text counts and averages consumed by the readability formulas.
// asl is words per sentence (also written OKS); asw and awl_syllables are
// the same quantity (syllables per word) kept under both names because the
// formulas refer to it by different symbols.
struct TextStats {
  std::int64_t sentence_count = 0;
  std::int64_t word_count = 0;
  double asl = 0.0;
  double asw = 0.0;
  double awl_chars = 0.0;
  double awl_syllables = 0.0;
  double phw = 0.0;                     // hard-word proportion, in [0,1]
  std::int64_t polysyllable_count = 0;  // words with >= 3 syllables, no suffix rule
  double h3 = 0.0;  // 3-syllable words per sentence
  double h4 = 0.0;  // 4-syllable words per sentence
  double h5 = 0.0;  // 5-syllable words per sentence
  double h6 = 0.0;  // words of >= 6 syllables per sentence
};

// UTF-8 helpers. Malformed bytes decode to U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Letters recognized by the tokenizer: ASCII, Latin-1 and Latin Extended-A.
bool is_alpha(char32_t cp);
bool is_digit(char32_t cp);

// Lowercasing with the Turkish dotted/dotless i rule: I -> ı, İ -> i.
char32_t turkish_lower(char32_t cp);
std::string turkish_lower_str(std::string_view s);

// Abbreviations whose trailing dot does not end a sentence.
const std::vector<std::string>& default_abbreviations();
// UTF-8 file, one abbreviation per line, '#' starts a comment line.
std::vector<std::string> load_abbreviations(const std::string& path);

// Splits on {. ! ? …}. Runs of terminators stay attached to the sentence.
// A dot between digits (decimals) or completing a listed abbreviation does
// not split. Throws EmptyTextError when text has no non-whitespace.
std::vector<std::string> split_sentences(
    std::string_view text,
    const std::vector<std::string>& abbreviations = default_abbreviations());

// Whitespace split, outer punctuation stripped, internal apostrophes kept.
// Tokens without an alphabetic character are dropped.
std::vector<WordToken> tokenize_words(std::string_view sentence,
                                      Language lang = Language::Turkish);

// Number of Turkish vowels {a,e,ı,i,o,ö,u,ü} after Turkish lowercasing.
// Vowel-free words count as 0 syllables.
int count_syllables_turkish(std::string_view word);

// Heuristic: maximal vowel groups {a,e,i,o,u,y} minus a terminal silent "e"
// (kept when a consonant precedes a final "le"); minimum 1 for any word
// containing a letter.
int count_syllables_english(std::string_view word);

// Full pipeline over a document. Throws EmptyTextError / NoWordsError.
TextStats compute_stats(
    std::string_view text, Language lang,
    HardWordRule rule = HardWordRule::PlainThreeSyllables,
    const std::vector<std::string>& abbreviations = default_abbreviations());

}  // namespace readkit::text
