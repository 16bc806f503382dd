#pragma once

// Russian alphabet facts, stress-mark parsing and word normalization.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace accent {

/// Combining acute accent placed after the stressed vowel.
inline constexpr char32_t kStressMark = U'\u0301';
/// Joins the context prefix to the current word in context-augmented inputs.
inline constexpr char32_t kSeparator = U'_';

enum class TextErrorKind {
  EmptyInput,
  IllegalCharacter,
  NoStressMark,
  MultipleStressMarks,
  StressOnConsonant,
  InvalidUtf8,
  NoVowel,
};

std::string_view to_string(TextErrorKind kind);

class TextError : public std::runtime_error {
 public:
  TextError(TextErrorKind kind, std::size_t position, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  TextErrorKind kind() const noexcept { return kind_; }
  /// Code-point offset of the offending character, or 0 when not applicable.
  std::size_t position() const noexcept { return position_; }

 private:
  TextErrorKind kind_;
  std::size_t position_;
};

class Alphabet {
 public:
  static constexpr int kLetterCount = 33;
  static constexpr int kVowelCount = 10;
  static constexpr int kSeparatorChannel = 33;

  static constexpr std::array<char32_t, kLetterCount> kLetters = {
      U'а', U'б', U'в', U'г', U'д', U'е', U'ё', U'ж', U'з', U'и', U'й',
      U'к', U'л', U'м', U'н', U'о', U'п', U'р', U'с', U'т', U'у', U'ф',
      U'х', U'ц', U'ч', U'ш', U'щ', U'ъ', U'ы', U'ь', U'э', U'ю', U'я'};

  static constexpr std::array<char32_t, kVowelCount> kVowels = {
      U'а', U'е', U'ё', U'и', U'о', U'у', U'ы', U'э', U'ю', U'я'};

  static constexpr bool is_letter(char32_t c) noexcept {
    return letter_index(c).has_value();
  }

  static constexpr bool is_vowel(char32_t c) noexcept {
    for (char32_t v : kVowels) {
      if (v == c) return true;
    }
    return false;
  }

  /// Index of a lowercase letter in alphabetical order (ё sits between е and ж).
  static constexpr std::optional<int> letter_index(char32_t c) noexcept {
    if (c >= U'а' && c <= U'е') return static_cast<int>(c - U'а');
    if (c == U'ё') return 6;
    if (c >= U'ж' && c <= U'я') return static_cast<int>(c - U'ж') + 7;
    return std::nullopt;
  }

  /// Letters map to 0..32, the separator to 33.
  static constexpr std::optional<int> channel(char32_t c) noexcept {
    if (c == kSeparator) return kSeparatorChannel;
    return letter_index(c);
  }

  static constexpr char32_t channel_char(int channel) {
    if (channel == kSeparatorChannel) return kSeparator;
    if (channel < 0 || channel >= kLetterCount) throw std::out_of_range("channel out of range");
    return kLetters[static_cast<std::size_t>(channel)];
  }

  /// Channel map as text: the letters in channel order, then the separator
  /// when `channels` is 34.
  static std::u32string channel_map(int channels);
};

/// A lowercase Russian word with exactly one stressed vowel.
class StressedWord {
 public:
  /// Validates letters-only content and a vowel at `stress`.
  static StressedWord make(std::u32string chars, std::size_t stress);

  const std::u32string& chars() const noexcept { return chars_; }
  std::size_t stress() const noexcept { return stress_; }
  std::size_t size() const noexcept { return chars_.size(); }

  friend bool operator==(const StressedWord&, const StressedWord&) = default;
  friend auto operator<=>(const StressedWord&, const StressedWord&) = default;

 private:
  StressedWord(std::u32string chars, std::size_t stress)
      : chars_(std::move(chars)), stress_(stress) {}

  std::u32string chars_;
  std::size_t stress_ = 0;
};

// UTF-8 <-> code points. Malformed input raises TextError(InvalidUtf8).
std::u32string from_utf8(std::string_view text);
std::string to_utf8(std::u32string_view text);
std::string to_utf8(char32_t c);

/// Lowercase mapping for Cyrillic (including Ё) and ASCII; other code points
/// are returned unchanged.
char32_t to_lower(char32_t c) noexcept;

std::u32string normalize(std::u32string_view raw);
std::u32string normalize(std::string_view raw_utf8);

StressedWord parse_stress_mark(std::u32string_view marked);
StressedWord parse_stress_mark(std::string_view marked_utf8);

std::u32string format_stress_mark(const StressedWord& word);

std::size_t count_syllables(std::u32string_view chars) noexcept;

/// Index of the ё when exactly one is present.
std::optional<std::size_t> yo_override(std::u32string_view chars) noexcept;

}  // namespace accent
