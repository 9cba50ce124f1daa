#include "readkit/text_core.hpp"

#include <algorithm>
#include <array>
#include <fstream>

namespace readkit::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() &&
               (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80) {
      cp = ((b0 & 0x1F) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
      if (cp < 0x80) cp = 0xFFFD;
    } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() &&
               (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) & 0xC0) == 0x80) {
      cp = ((b0 & 0x0F) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
      if (cp < 0x800) cp = 0xFFFD;
    } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() &&
               (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80 &&
               (static_cast<unsigned char>(s[i + 2]) & 0xC0) == 0x80 &&
               (static_cast<unsigned char>(s[i + 3]) & 0xC0) == 0x80) {
      cp = ((b0 & 0x07) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12) |
           ((static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6) |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
      if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

bool is_alpha(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;  // Latin-1 letters
  if (cp >= 0x0100 && cp <= 0x017F) return true;                         // Latin Extended-A
  return false;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

char32_t turkish_lower(char32_t cp) {
  if (cp == U'I') return 0x0131;  // I -> ı
  if (cp == 0x0130) return U'i';  // İ -> i
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x0100 && cp <= 0x0137 && (cp % 2) == 0) return cp + 1;
  if (cp >= 0x0139 && cp <= 0x0148 && (cp % 2) == 1) return cp + 1;
  if (cp >= 0x014A && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
  if (cp == 0x0178) return 0xFF;
  if (cp >= 0x0179 && cp <= 0x017E && (cp % 2) == 1) return cp + 1;
  return cp;
}

std::string turkish_lower_str(std::string_view s) {
  std::u32string cps = decode_utf8(s);
  for (char32_t& cp : cps) cp = turkish_lower(cp);
  return encode_utf8(cps);
}

namespace {

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0;
}

bool is_terminator(char32_t cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == 0x2026;
}

bool is_turkish_vowel(char32_t cp) {
  switch (cp) {
    case U'a': case U'e': case 0x0131: case U'i':
    case U'o': case 0xF6: case U'u': case 0xFC:
      return true;
    default:
      return false;
  }
}

bool is_english_vowel(char32_t cp) {
  switch (cp) {
    case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
      return true;
    default:
      return false;
  }
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> kDefaults = {"Dr.", "Prof.", "vb.", "vs."};
  return kDefaults;
}

std::vector<std::string> load_abbreviations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view text,
                                         const std::vector<std::string>& abbreviations) {
  std::u32string cps = decode_utf8(text);
  bool has_content = std::any_of(cps.begin(), cps.end(),
                                 [](char32_t c) { return !is_space(c); });
  if (!has_content) throw EmptyTextError();

  std::vector<std::u32string> abbr32;
  abbr32.reserve(abbreviations.size());
  for (const auto& a : abbreviations) abbr32.push_back(decode_utf8(a));

  std::vector<std::string> sentences;
  size_t start = 0;
  size_t i = 0;
  auto emit = [&](size_t end) {
    std::u32string_view span(cps.data() + start, end - start);
    std::string s = encode_utf8(span);
    std::string_view t = trim(s);
    if (!t.empty()) sentences.emplace_back(t);
    start = end;
  };

  while (i < cps.size()) {
    char32_t c = cps[i];
    if (!is_terminator(c)) {
      ++i;
      continue;
    }
    if (c == U'.') {
      // Decimal number: dot between digits.
      if (i > 0 && i + 1 < cps.size() && is_digit(cps[i - 1]) && is_digit(cps[i + 1])) {
        ++i;
        continue;
      }
      // Abbreviation: maximal letter run before the dot, plus the dot.
      size_t j = i;
      while (j > start && is_alpha(cps[j - 1])) --j;
      if (j < i) {
        std::u32string word(cps.begin() + j, cps.begin() + i + 1);
        bool is_abbr = std::any_of(abbr32.begin(), abbr32.end(),
                                   [&](const std::u32string& a) { return a == word; });
        if (is_abbr) {
          ++i;
          continue;
        }
      }
    }
    // Consume the whole terminator run ("...", "?!").
    size_t end = i + 1;
    while (end < cps.size() && is_terminator(cps[end])) ++end;
    emit(end);
    i = end;
  }
  if (start < cps.size()) emit(cps.size());
  if (sentences.empty()) throw EmptyTextError();
  return sentences;
}

std::vector<WordToken> tokenize_words(std::string_view sentence, Language lang) {
  std::u32string cps = decode_utf8(sentence);
  std::vector<WordToken> tokens;
  size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    size_t b = i;
    while (i < cps.size() && !is_space(cps[i])) ++i;
    if (b == i) break;
    // Strip outer punctuation; apostrophes survive only word-internally.
    size_t lo = b, hi = i;
    while (lo < hi && !is_alpha(cps[lo]) && !is_digit(cps[lo])) ++lo;
    while (hi > lo && !is_alpha(cps[hi - 1]) && !is_digit(cps[hi - 1])) --hi;
    if (lo >= hi) continue;
    std::u32string_view surf(cps.data() + lo, hi - lo);
    int chars = 0;
    for (char32_t c : surf)
      if (is_alpha(c)) ++chars;
    if (chars == 0) continue;
    WordToken tok;
    tok.surface = encode_utf8(surf);
    tok.char_count = chars;
    tok.syllable_count = lang == Language::Turkish
                             ? count_syllables_turkish(tok.surface)
                             : count_syllables_english(tok.surface);
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

int count_syllables_turkish(std::string_view word) {
  std::u32string cps = decode_utf8(word);
  int n = 0;
  for (char32_t c : cps)
    if (is_turkish_vowel(turkish_lower(c))) ++n;
  return n;
}

int count_syllables_english(std::string_view word) {
  std::u32string cps = decode_utf8(word);
  std::u32string letters;
  for (char32_t c : cps)
    if (is_alpha(c)) letters.push_back(turkish_lower(c));
  if (letters.empty()) return 0;

  int groups = 0;
  bool in_group = false;
  for (char32_t c : letters) {
    if (is_english_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  size_t n = letters.size();
  if (n >= 2 && letters[n - 1] == U'e' && !is_english_vowel(letters[n - 2])) {
    bool consonant_le = letters[n - 2] == U'l' && n >= 3 && !is_english_vowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

TextStats compute_stats(std::string_view text, Language lang, HardWordRule rule,
                        const std::vector<std::string>& abbreviations) {
  std::vector<std::string> sentences = split_sentences(text, abbreviations);

  std::int64_t words = 0, syllables = 0, chars = 0, hard = 0, poly = 0;
  std::int64_t c3 = 0, c4 = 0, c5 = 0, c6 = 0;
  for (const std::string& s : sentences) {
    for (const WordToken& tok : tokenize_words(s, lang)) {
      ++words;
      syllables += tok.syllable_count;
      chars += tok.char_count;
      if (tok.syllable_count >= 3) {
        ++poly;
        bool is_hard = true;
        if (lang == Language::English && rule == HardWordRule::GunningSuffixException &&
            tok.syllable_count == 3) {
          std::string low = turkish_lower_str(tok.surface);
          if (low.size() > 2 &&
              (low.ends_with("ed") || low.ends_with("es")) &&
              count_syllables_english(low.substr(0, low.size() - 2)) == 2) {
            is_hard = false;
          }
        }
        if (is_hard) ++hard;
      }
      switch (tok.syllable_count) {
        case 3: ++c3; break;
        case 4: ++c4; break;
        case 5: ++c5; break;
        default:
          if (tok.syllable_count >= 6) ++c6;
      }
    }
  }
  if (words == 0) throw NoWordsError();

  TextStats st;
  st.sentence_count = static_cast<std::int64_t>(sentences.size());
  st.word_count = words;
  const double sc = static_cast<double>(st.sentence_count);
  const double wc = static_cast<double>(words);
  st.asl = wc / sc;
  st.asw = static_cast<double>(syllables) / wc;
  st.awl_chars = static_cast<double>(chars) / wc;
  st.awl_syllables = st.asw;
  st.phw = static_cast<double>(hard) / wc;
  st.polysyllable_count = poly;
  st.h3 = static_cast<double>(c3) / sc;
  st.h4 = static_cast<double>(c4) / sc;
  st.h5 = static_cast<double>(c5) / sc;
  st.h6 = static_cast<double>(c6) / sc;
  return st;
}

}  // namespace readkit::text
