#include <set>

#include "accent/rng.hpp"
#include "accent/textcore.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace accent;
using testing::s;
using testing::u;

namespace {

TextErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const TextError& e) {
    return e.kind();
  }
  FAIL("expected a TextError");
  return TextErrorKind::EmptyInput;
}

std::u32string random_letters(SplitMix64& rng, std::size_t n) {
  std::u32string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Alphabet::kLetters[rng.below(33)]);
  return out;
}

}  // namespace

TEST_CASE("alphabet has 33 letters, 10 vowels and a separator channel") {
  CHECK(Alphabet::kLetters.size() == 33);
  CHECK(Alphabet::kVowels.size() == 10);
  std::set<int> indices;
  for (char32_t c : Alphabet::kLetters) {
    const auto idx = Alphabet::letter_index(c);
    REQUIRE(idx);
    indices.insert(*idx);
    CHECK(Alphabet::channel_char(*idx) == c);
  }
  CHECK(indices.size() == 33);
  CHECK(*indices.begin() == 0);
  CHECK(*indices.rbegin() == 32);
  for (char32_t v : Alphabet::kVowels) CHECK(Alphabet::is_letter(v));
  CHECK(Alphabet::letter_index(U'ё') == 6);
  CHECK(Alphabet::channel(kSeparator) == 33);
  CHECK_FALSE(Alphabet::letter_index(U'_'));
  CHECK(s(Alphabet::channel_map(34)) == "абвгдеёжзийклмнопрстуфхцчшщъыьэюя_");
  CHECK(s(Alphabet::channel_map(33)) == "абвгдеёжзийклмнопрстуфхцчшщъыьэюя");
}

TEST_CASE("utf-8 decoding") {
  CHECK(testing::s(u("облака́")) == "облака́");
  CHECK(u("ёж").size() == 2);
  CHECK(kind_of([] { from_utf8("\xd0"); }) == TextErrorKind::InvalidUtf8);
  CHECK(kind_of([] { from_utf8("\xff\xfe"); }) == TextErrorKind::InvalidUtf8);
}

TEST_CASE("normalize") {
  CHECK(s(normalize(std::string_view("Облака"))) == "облака");
  CHECK(s(normalize(std::string_view("ёж"))) == "ёж");
  CHECK(s(normalize(std::string_view("ЁЖ"))) == "ёж");
  CHECK(s(normalize(std::string_view("те_облака"))) == "те_облака");
  CHECK(kind_of([] { normalize(std::string_view("word")); }) == TextErrorKind::IllegalCharacter);
  CHECK(kind_of([] { normalize(std::string_view("")); }) == TextErrorKind::EmptyInput);
  CHECK(kind_of([] { normalize(std::string_view("кто-то")); }) == TextErrorKind::IllegalCharacter);
  try {
    normalize(std::string_view("доm"));
  } catch (const TextError& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("normalize is idempotent") {
  SplitMix64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::u32string raw = random_letters(rng, 1 + rng.below(12));
    for (auto& c : raw) {
      if (rng.below(3) == 0 && c != U'ё') c = static_cast<char32_t>(c - 0x20);  // upper case
    }
    const auto once = normalize(raw);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("parse_stress_mark") {
  auto w = parse_stress_mark(std::string_view("облака́"));
  CHECK(s(w.chars()) == "облака");
  CHECK(w.stress() == 5);
  w = parse_stress_mark(std::string_view("о́блака"));
  CHECK(w.stress() == 0);
  w = parse_stress_mark(std::string_view("Мо́ре"));
  CHECK(s(w.chars()) == "море");
  CHECK(w.stress() == 1);

  CHECK(kind_of([] { parse_stress_mark(std::string_view("сло́во́")); }) ==
        TextErrorKind::MultipleStressMarks);
  CHECK(kind_of([] { parse_stress_mark(std::string_view("слово")); }) ==
        TextErrorKind::NoStressMark);
  CHECK(kind_of([] { parse_stress_mark(std::string_view("сл́ово")); }) ==
        TextErrorKind::StressOnConsonant);
  CHECK(kind_of([] { parse_stress_mark(std::string_view("́дом")); }) ==
        TextErrorKind::StressOnConsonant);
  CHECK(kind_of([] { parse_stress_mark(std::string_view("dóm")); }) ==
        TextErrorKind::IllegalCharacter);
}

TEST_CASE("format_stress_mark") {
  CHECK(s(format_stress_mark(StressedWord::make(u("облака"), 5))) == "облака́");
  CHECK(s(format_stress_mark(StressedWord::make(u("дом"), 1))) == "до́м");
  CHECK(s(format_stress_mark(StressedWord::make(u("руки"), 3))) == "руки́");
}

TEST_CASE("StressedWord rejects a stress index off a vowel") {
  CHECK(kind_of([] { StressedWord::make(U"дом", 0); }) == TextErrorKind::StressOnConsonant);
  CHECK(kind_of([] { StressedWord::make(U"дом", 7); }) == TextErrorKind::StressOnConsonant);
  CHECK(kind_of([] { StressedWord::make(U"", 0); }) == TextErrorKind::EmptyInput);
  CHECK(kind_of([] { StressedWord::make(U"те_о", 3); }) == TextErrorKind::IllegalCharacter);
}

TEST_CASE("format then parse is the identity") {
  SplitMix64 rng(5);
  int checked = 0;
  while (checked < 5000) {
    const auto chars = random_letters(rng, 1 + rng.below(15));
    std::vector<std::size_t> vowels;
    for (std::size_t i = 0; i < chars.size(); ++i) {
      if (Alphabet::is_vowel(chars[i])) vowels.push_back(i);
    }
    if (vowels.empty()) continue;
    const auto w = StressedWord::make(chars, vowels[rng.below(vowels.size())]);
    CHECK(parse_stress_mark(format_stress_mark(w)) == w);
    ++checked;
  }
}

TEST_CASE("count_syllables") {
  CHECK(count_syllables(u("облака")) == 3);
  CHECK(count_syllables(u("всплеск")) == 1);
  CHECK(count_syllables(u("вздрогнувшему")) == 4);
  CHECK(count_syllables(u("вздр")) == 0);
  CHECK(count_syllables(u("ёлка")) == 2);

  SplitMix64 rng(3);
  const std::u32string vowels = U"аеёиоуыэюя";
  for (int i = 0; i < 2000; ++i) {
    const auto chars = random_letters(rng, rng.below(20));
    std::size_t brute = 0;
    for (char32_t c : chars) brute += vowels.find(c) != std::u32string::npos;
    CHECK(count_syllables(chars) == brute);
  }
}

TEST_CASE("yo_override") {
  CHECK(yo_override(u("ёж")) == 0);
  CHECK_FALSE(yo_override(u("дом")));
  CHECK_FALSE(yo_override(u("трёхколёсный")));
  CHECK(yo_override(u("её")) == 1);
}
