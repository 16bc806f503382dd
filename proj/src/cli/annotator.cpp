#include <stdexcept>

#include "accent/cli.hpp"
#include "accent/dataset.hpp"
#include "accent/nn/model.hpp"
#include "accent/textcore.hpp"

namespace accent::cli {

namespace {

bool is_word_char(char32_t c) { return c == kStressMark || Alphabet::is_letter(to_lower(c)); }

}  // namespace

Annotator::Annotator(const nn::ModelParams<float>& params, AccentOptions options, Warn warn)
    : params_(params), options_(options), warn_(std::move(warn)) {
  if (options_.context && params_.arch.encoding.channels <= Alphabet::kSeparatorChannel) {
    throw std::invalid_argument("context needs a model with a separator channel");
  }
}

std::optional<std::size_t> Annotator::stress_for(std::u32string_view word,
                                                 std::optional<std::u32string_view> previous) {
  const std::size_t syllables = count_syllables(word);
  if (syllables == 0) return std::nullopt;
  if (options_.yo_rule) {
    if (const auto yo = yo_override(word)) return yo;
  }
  if (options_.monosyllable_shortcut && syllables == 1) {
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (Alphabet::is_vowel(word[i])) return i;
    }
  }

  std::u32string input;
  if (options_.context && previous) {
    input = context_prefix(*previous);
    input.push_back(kSeparator);
  }
  const std::size_t offset = input.size();
  input += word;
  const auto max_len = static_cast<std::size_t>(params_.arch.encoding.max_len);
  if (input.size() > max_len) {
    if (warn_) {
      warn_("'" + to_utf8(word) + "' needs " + std::to_string(input.size()) +
            " positions, model max_len is " + std::to_string(max_len) + "; left unaccented");
    }
    return std::nullopt;
  }
  ++model_calls_;
  const auto channels = channel_sequence(input, params_.arch.encoding);
  const auto probs = nn::forward(params_, std::span<const int>(channels), false);
  // Only the word's own positions compete; the context prefix is never marked.
  return decode_position(std::span<const float>(probs.data() + offset, word.size()), word,
                         options_.decode);
}

std::string Annotator::annotate_line(std::string_view line) {
  const std::u32string text = from_utf8(line);
  std::u32string out;
  out.reserve(text.size() + text.size() / 4);
  std::u32string previous;
  bool have_previous = false;

  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t end = i;
    bool marked = false;
    while (end < text.size() && is_word_char(text[end])) marked |= text[end++] == kStressMark;
    const std::u32string_view original(text.data() + i, end - i);

    std::u32string lower;
    for (char32_t c : original) {
      if (c != kStressMark) lower.push_back(to_lower(c));
    }
    std::optional<std::size_t> stress;
    if (!marked && !lower.empty()) {
      stress = stress_for(lower, have_previous ? std::optional<std::u32string_view>(previous)
                                               : std::nullopt);
    }
    // ё already shows where the stress falls and is written without a mark.
    if (stress && lower[*stress] != U'ё') {
      out.append(original.substr(0, *stress + 1));
      out.push_back(kStressMark);
      out.append(original.substr(*stress + 1));
    } else {
      out.append(original);
    }
    if (!lower.empty()) {
      previous = std::move(lower);
      have_previous = true;
    }
    i = end;
  }
  return to_utf8(out);
}

}  // namespace accent::cli
