#include <doctest.h>

#include <string>
#include <vector>

#include "readkit/io.hpp"
#include "readkit/text_core.hpp"

using namespace readkit;
using namespace readkit::text;

TEST_CASE("utf8 round trip preserves Turkish letters") {
  const std::string s = "Çağrı öğle İŞİ ığdır şük";
  auto cps = decode_utf8(s);
  CHECK(encode_utf8(cps) == s);
  CHECK(decode_utf8("ğ").size() == 1);
  CHECK(decode_utf8("ğ")[0] == char32_t{0x011F});
}

TEST_CASE("utf8 malformed bytes decode to replacement character") {
  auto cps = decode_utf8("\xFF");
  REQUIRE(cps.size() == 1);
  CHECK(cps[0] == char32_t{0xFFFD});
  // Truncated two-byte sequence: one replacement per bad byte.
  auto trunc = decode_utf8("\xC3");
  REQUIRE(trunc.size() == 1);
  CHECK(trunc[0] == char32_t{0xFFFD});
}

TEST_CASE("turkish lowercasing separates dotted and dotless i") {
  CHECK(turkish_lower(U'I') == char32_t{0x0131});  // I -> dotless i
  CHECK(turkish_lower(char32_t{0x0130}) == U'i');  // dotted capital I -> i
  CHECK(turkish_lower(U'A') == U'a');
  CHECK(turkish_lower(char32_t{0x00C7}) == char32_t{0x00E7});  // C-cedilla
  CHECK(turkish_lower(char32_t{0x011E}) == char32_t{0x011F});  // G-breve
  CHECK(turkish_lower(char32_t{0x00D6}) == char32_t{0x00F6});  // O-umlaut
  CHECK(turkish_lower(char32_t{0x015E}) == char32_t{0x015F});  // S-cedilla
  CHECK(turkish_lower(char32_t{0x00DC}) == char32_t{0x00FC});  // U-umlaut
  CHECK(turkish_lower_str("İSTANBUL IĞDIR") == "istanbul ığdır");
}

TEST_CASE("turkish syllables equal vowel count") {
  CHECK(count_syllables_turkish("ve") == 1);
  CHECK(count_syllables_turkish("merhaba") == 3);
  CHECK(count_syllables_turkish("okunabilirlik") == 6);
  CHECK(count_syllables_turkish("") == 0);
  CHECK(count_syllables_turkish("krt") == 0);
  CHECK(count_syllables_turkish("OKUNABİLİRLİK") == 6);
  CHECK(count_syllables_turkish("IŞIK") == 2);
  CHECK(count_syllables_turkish("üniversite") == 5);
  CHECK(count_syllables_turkish("öğretmen") == 3);
}

TEST_CASE("turkish syllable count is additive over concatenation") {
  const std::vector<std::string> pool = {"ve",      "merhaba", "okunabilirlik",
                                         "krt",     "IŞIK",    "üniversite",
                                         "öğretmen", ""};
  for (const auto& a : pool) {
    for (const auto& b : pool) {
      CHECK(count_syllables_turkish(a + b) ==
            count_syllables_turkish(a) + count_syllables_turkish(b));
    }
  }
}

TEST_CASE("english syllable heuristic") {
  CHECK(count_syllables_english("cat") == 1);
  CHECK(count_syllables_english("because") == 2);
  CHECK(count_syllables_english("table") == 2);
  CHECK(count_syllables_english("the") == 1);
  CHECK(count_syllables_english("apple") == 2);
  CHECK(count_syllables_english("rhythm") == 1);
  CHECK(count_syllables_english("me") == 1);  // minimum one syllable
  CHECK(count_syllables_english("strength") == 1);
  CHECK(count_syllables_english("amazed") == 3);
  CHECK(count_syllables_english("amaz") == 2);
  CHECK(count_syllables_english("wonderful") == 3);
  CHECK(count_syllables_english("understanding") == 4);
}

TEST_CASE("sentence splitting on terminators") {
  auto s = split_sentences("Geldi. Gitti.");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "Geldi.");
  CHECK(s[1] == "Gitti.");

  CHECK(split_sentences("Selam dünya").size() == 1);
  CHECK(split_sentences("Ne oldu? Bilmem! Peki.").size() == 3);
}

TEST_CASE("terminator runs stay attached to their sentence") {
  auto s = split_sentences("Ne?! Evet...");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "Ne?!");
  CHECK(s[1] == "Evet...");
}

TEST_CASE("abbreviations do not split sentences") {
  CHECK(split_sentences("Dr. Ali geldi.").size() == 1);
  CHECK(split_sentences("Elma, armut vb. ürünler geldi.").size() == 1);
  CHECK(split_sentences("Prof. Ayşe konuştu. Sonra gitti.").size() == 2);

  // Custom list: "Sn." only guards when listed.
  CHECK(split_sentences("Sn. Ak geldi.", {"Sn."}).size() == 1);
  CHECK(split_sentences("Sn. Ak geldi.", {}).size() == 2);
}

TEST_CASE("decimal numbers do not split sentences") {
  CHECK(split_sentences("Oran 3.5 oldu.").size() == 1);
  CHECK(split_sentences("Fiyat 10.25 lira. Ucuz.").size() == 2);
}

TEST_CASE("empty text raises") {
  CHECK_THROWS_AS(split_sentences(""), EmptyTextError);
  CHECK_THROWS_AS(split_sentences("   \n\t "), EmptyTextError);
}

TEST_CASE("word tokenization strips outer punctuation") {
  auto toks = tokenize_words("Ali geldi.");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].surface == "Ali");
  CHECK(toks[1].surface == "geldi");
  CHECK(toks[0].char_count == 3);
  CHECK(toks[1].char_count == 5);
  CHECK(toks[0].syllable_count == 2);
  CHECK(toks[1].syllable_count == 2);

  auto wrapped = tokenize_words("(merhaba!)");
  REQUIRE(wrapped.size() == 1);
  CHECK(wrapped[0].surface == "merhaba");
}

TEST_CASE("internal apostrophes stay inside one token") {
  auto toks = tokenize_words("İstanbul'da yaşıyor");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].surface == "İstanbul'da");
  CHECK(toks[0].char_count == 10);  // apostrophe is not a letter
  CHECK(toks[1].surface == "yaşıyor");
}

TEST_CASE("tokens without letters are dropped") {
  CHECK(tokenize_words("— 42 —").empty());
  CHECK(tokenize_words("100 200 ...").empty());
}

TEST_CASE("english mode counts english syllables") {
  auto toks = tokenize_words("Hello world", Language::English);
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].syllable_count == 2);
  CHECK(toks[1].syllable_count == 1);
}

TEST_CASE("compute_stats on two short turkish sentences") {
  auto st = compute_stats("Ali koştu. Ayşe geldi.", Language::Turkish);
  CHECK(st.sentence_count == 2);
  CHECK(st.word_count == 4);
  CHECK(st.asl == doctest::Approx(2.0));
  CHECK(st.h3 == 0.0);
  CHECK(st.h4 == 0.0);
  CHECK(st.h5 == 0.0);
  CHECK(st.h6 == 0.0);
  CHECK(st.polysyllable_count == 0);
  CHECK(st.asw == doctest::Approx(2.0));
}

TEST_CASE("compute_stats monosyllable text") {
  auto st = compute_stats("Bu ve şu.", Language::Turkish);
  CHECK(st.sentence_count == 1);
  CHECK(st.word_count == 3);
  CHECK(st.asw == doctest::Approx(1.0));
  CHECK(st.polysyllable_count == 0);
  CHECK(st.phw == 0.0);
}

TEST_CASE("compute_stats one sentence of four three-syllable words") {
  auto st = compute_stats("Araba araba araba araba.", Language::Turkish);
  CHECK(st.sentence_count == 1);
  CHECK(st.asl == doctest::Approx(4.0));
  CHECK(st.h3 == doctest::Approx(4.0));
  CHECK(st.h4 == 0.0);
  CHECK(st.h5 == 0.0);
  CHECK(st.h6 == 0.0);
  CHECK(st.polysyllable_count == 4);
  CHECK(st.phw == doctest::Approx(1.0));
}

TEST_CASE("gunning rule excludes -ed/-es third syllables from hard words") {
  // "amazed" has 3 heuristic syllables; stripping "ed" leaves 2, so it is
  // polysyllabic but not hard under the Gunning rule.
  auto plain = compute_stats("He was amazed.", Language::English,
                             HardWordRule::PlainThreeSyllables);
  CHECK(plain.polysyllable_count == 1);
  CHECK(plain.phw == doctest::Approx(1.0 / 3.0));

  auto gunning = compute_stats("He was amazed.", Language::English,
                               HardWordRule::GunningSuffixException);
  CHECK(gunning.polysyllable_count == 1);
  CHECK(gunning.phw == 0.0);

  // A genuinely hard word keeps counting under both rules.
  auto hard = compute_stats("A wonderful day.", Language::English,
                            HardWordRule::GunningSuffixException);
  CHECK(hard.phw == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("compute_stats error cases") {
  CHECK_THROWS_AS(compute_stats("", Language::Turkish), EmptyTextError);
  CHECK_THROWS_AS(compute_stats("  \n ", Language::Turkish), EmptyTextError);
  CHECK_THROWS_AS(compute_stats("42 — 17.", Language::Turkish), NoWordsError);
}

TEST_CASE("compute_stats equals per-sentence re-aggregation") {
  const std::string text =
      "Üniversite öğrencileri merhaba dedi. Bu ve şu geldi. "
      "Okunabilirlik araştırması sürüyor.";
  auto st = compute_stats(text, Language::Turkish);

  auto sentences = split_sentences(text);
  std::int64_t words = 0, syll = 0, chars = 0, poly = 0;
  std::int64_t c3 = 0, c4 = 0, c5 = 0, c6 = 0;
  for (const auto& s : sentences) {
    for (const auto& tok : tokenize_words(s)) {
      ++words;
      syll += tok.syllable_count;
      chars += tok.char_count;
      if (tok.syllable_count >= 3) ++poly;
      if (tok.syllable_count == 3) ++c3;
      if (tok.syllable_count == 4) ++c4;
      if (tok.syllable_count == 5) ++c5;
      if (tok.syllable_count >= 6) ++c6;
    }
  }
  const double sc = static_cast<double>(sentences.size());
  const double wc = static_cast<double>(words);
  CHECK(st.sentence_count == static_cast<std::int64_t>(sentences.size()));
  CHECK(st.word_count == words);
  CHECK(st.asl == doctest::Approx(wc / sc).epsilon(1e-12));
  CHECK(st.asw == doctest::Approx(static_cast<double>(syll) / wc).epsilon(1e-12));
  CHECK(st.awl_chars ==
        doctest::Approx(static_cast<double>(chars) / wc).epsilon(1e-12));
  CHECK(st.awl_syllables == st.asw);
  CHECK(st.polysyllable_count == poly);
  CHECK(st.h3 == doctest::Approx(static_cast<double>(c3) / sc).epsilon(1e-12));
  CHECK(st.h4 == doctest::Approx(static_cast<double>(c4) / sc).epsilon(1e-12));
  CHECK(st.h5 == doctest::Approx(static_cast<double>(c5) / sc).epsilon(1e-12));
  CHECK(st.h6 == doctest::Approx(static_cast<double>(c6) / sc).epsilon(1e-12));
  CHECK(st.h3 + st.h4 + st.h5 + st.h6 <= st.asl);
}

TEST_CASE("determinism: identical input gives identical stats") {
  const std::string text = "Merhaba dünya. Okunabilirlik önemli bir konudur.";
  auto a = compute_stats(text, Language::Turkish);
  auto b = compute_stats(text, Language::Turkish);
  CHECK(a.asl == b.asl);
  CHECK(a.asw == b.asw);
  CHECK(a.awl_chars == b.awl_chars);
  CHECK(a.phw == b.phw);
  CHECK(a.h3 == b.h3);
  CHECK(a.h6 == b.h6);
}

TEST_CASE("abbreviation file loading skips comments") {
  const std::string path = "abbrev_test.txt";
  io::atomic_write(path, "# comment line\nSn.\nvb.\n\n");
  auto abbr = load_abbreviations(path);
  REQUIRE(abbr.size() == 2);
  CHECK(abbr[0] == "Sn.");
  CHECK(abbr[1] == "vb.");
  CHECK_THROWS_AS(load_abbreviations("missing_abbrev_file.txt"), FileError);
}
