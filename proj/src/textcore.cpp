#include "accent/textcore.hpp"

#include <algorithm>
#include <cstdio>

namespace accent {

std::string_view to_string(TextErrorKind kind) {
  switch (kind) {
    case TextErrorKind::EmptyInput: return "EmptyInput";
    case TextErrorKind::IllegalCharacter: return "IllegalCharacter";
    case TextErrorKind::NoStressMark: return "NoStressMark";
    case TextErrorKind::MultipleStressMarks: return "MultipleStressMarks";
    case TextErrorKind::StressOnConsonant: return "StressOnConsonant";
    case TextErrorKind::InvalidUtf8: return "InvalidUtf8";
    case TextErrorKind::NoVowel: return "NoVowel";
  }
  return "Unknown";
}

std::u32string Alphabet::channel_map(int channels) {
  std::u32string map(kLetters.begin(), kLetters.end());
  if (channels > kLetterCount) map.push_back(kSeparator);
  return map;
}

namespace {

std::string describe(char32_t c) {
  std::string out = "'" + to_utf8(c) + "'";
  char buf[16];
  std::snprintf(buf, sizeof buf, " (U+%04X)", static_cast<unsigned>(c));
  return out + buf;
}

}  // namespace

StressedWord StressedWord::make(std::u32string chars, std::size_t stress) {
  if (chars.empty()) throw TextError(TextErrorKind::EmptyInput, 0, "empty word");
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (!Alphabet::is_letter(chars[i])) {
      throw TextError(TextErrorKind::IllegalCharacter, i,
                      "illegal character " + describe(chars[i]) + " at position " +
                          std::to_string(i));
    }
  }
  if (stress >= chars.size() || !Alphabet::is_vowel(chars[stress])) {
    throw TextError(TextErrorKind::StressOnConsonant, stress,
                    "stress index " + std::to_string(stress) + " is not a vowel of '" +
                        to_utf8(chars) + "'");
  }
  return StressedWord(std::move(chars), stress);
}

std::u32string from_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto fail = [&](std::size_t at) {
    return TextError(TextErrorKind::InvalidUtf8, at,
                     "malformed UTF-8 at byte " + std::to_string(at));
  };
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      throw fail(i);
    }
    if (extra > 0 && i + static_cast<std::size_t>(extra) >= text.size()) throw fail(i);
    for (int k = 1; k <= extra; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
      if ((cont & 0xC0) != 0x80) throw fail(i + static_cast<std::size_t>(k));
      cp = (cp << 6) | (cont & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) throw fail(i);
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string to_utf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 2);
  for (char32_t c : text) out += to_utf8(c);
  return out;
}

char32_t to_lower(char32_t c) noexcept {
  if (c >= U'А' && c <= U'Я') return c + 0x20;
  if (c == U'Ё') return U'ё';
  if (c >= U'A' && c <= U'Z') return c + 0x20;
  return c;
}

std::u32string normalize(std::u32string_view raw) {
  if (raw.empty()) throw TextError(TextErrorKind::EmptyInput, 0, "empty input");
  std::u32string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char32_t c = to_lower(raw[i]);
    if (!Alphabet::channel(c)) {
      throw TextError(TextErrorKind::IllegalCharacter, i,
                      "illegal character " + describe(raw[i]) + " at position " +
                          std::to_string(i) + " in '" + to_utf8(raw) + "'");
    }
    out.push_back(c);
  }
  return out;
}

std::u32string normalize(std::string_view raw_utf8) { return normalize(from_utf8(raw_utf8)); }

StressedWord parse_stress_mark(std::u32string_view marked) {
  if (marked.empty()) throw TextError(TextErrorKind::EmptyInput, 0, "empty input");
  for (std::size_t i = 0; i < marked.size(); ++i) {
    if (marked[i] != kStressMark && !Alphabet::is_letter(to_lower(marked[i]))) {
      throw TextError(TextErrorKind::IllegalCharacter, i,
                      "illegal character " + describe(marked[i]) + " at position " +
                          std::to_string(i) + " in '" + to_utf8(marked) + "'");
    }
  }
  const auto marks = std::count(marked.begin(), marked.end(), kStressMark);
  if (marks == 0) {
    throw TextError(TextErrorKind::NoStressMark, 0,
                    "no stress mark in '" + to_utf8(marked) + "'");
  }
  if (marks > 1) {
    const auto second = marked.find(kStressMark, marked.find(kStressMark) + 1);
    throw TextError(TextErrorKind::MultipleStressMarks, second,
                    "more than one stress mark in '" + to_utf8(marked) + "'");
  }
  const std::size_t mark_at = marked.find(kStressMark);
  if (mark_at == 0) {
    throw TextError(TextErrorKind::StressOnConsonant, 0,
                    "stress mark with no preceding letter in '" + to_utf8(marked) + "'");
  }
  std::u32string bare(marked.substr(0, mark_at));
  bare.append(marked.substr(mark_at + 1));
  std::u32string chars = normalize(bare);
  const std::size_t stress = mark_at - 1;
  if (!Alphabet::is_vowel(chars[stress])) {
    throw TextError(TextErrorKind::StressOnConsonant, stress,
                    "stress mark follows consonant " + describe(chars[stress]) + " in '" +
                        to_utf8(marked) + "'");
  }
  return StressedWord::make(std::move(chars), stress);
}

StressedWord parse_stress_mark(std::string_view marked_utf8) {
  return parse_stress_mark(from_utf8(marked_utf8));
}

std::u32string format_stress_mark(const StressedWord& word) {
  std::u32string out = word.chars();
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(word.stress()) + 1, kStressMark);
  return out;
}

std::size_t count_syllables(std::u32string_view chars) noexcept {
  return static_cast<std::size_t>(
      std::count_if(chars.begin(), chars.end(), [](char32_t c) { return Alphabet::is_vowel(c); }));
}

std::optional<std::size_t> yo_override(std::u32string_view chars) noexcept {
  const auto first = chars.find(U'ё');
  if (first == std::u32string_view::npos) return std::nullopt;
  if (chars.find(U'ё', first + 1) != std::u32string_view::npos) return std::nullopt;
  return first;
}

}  // namespace accent
