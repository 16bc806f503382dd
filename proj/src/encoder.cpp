#include "accent/encoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace accent {

void EncodingConfig::validate() const {
  if (max_len < 1) throw std::invalid_argument("max_len must be positive");
  if (channels != Alphabet::kLetterCount && channels != Alphabet::kLetterCount + 1) {
    throw std::invalid_argument("channels must be 33 or 34");
  }
}

std::vector<int> channel_sequence(std::u32string_view input, const EncodingConfig& cfg) {
  if (input.size() > static_cast<std::size_t>(cfg.max_len)) {
    throw InstanceTooLong(input.size(), static_cast<std::size_t>(cfg.max_len));
  }
  std::vector<int> out;
  out.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto ch = Alphabet::channel(input[i]);
    if (!ch || *ch >= cfg.channels) {
      throw TextError(TextErrorKind::IllegalCharacter, i,
                      "character at position " + std::to_string(i) + " of '" + to_utf8(input) +
                          "' has no channel in a " + std::to_string(cfg.channels) +
                          "-channel encoding");
    }
    out.push_back(*ch);
  }
  return out;
}

Encoded encode(const TrainInstance& instance, const EncodingConfig& cfg) {
  cfg.validate();
  const auto channels = channel_sequence(instance.input(), cfg);
  Encoded encoded{InputMatrix(cfg.max_len, cfg.channels),
                  TargetVector{std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.max_len), 0)},
                  static_cast<int>(channels.size())};
  for (std::size_t r = 0; r < channels.size(); ++r) encoded.input(static_cast<int>(r), channels[r]) = 1;
  encoded.target.values[instance.target()] = 1;
  return encoded;
}

std::vector<int> channel_sequence(const InputMatrix& matrix, int length) {
  if (length < 0 || length > matrix.rows()) throw std::out_of_range("length outside matrix");
  std::vector<int> out(static_cast<std::size_t>(length), -1);
  for (int r = 0; r < length; ++r) {
    const auto row = matrix.row(r);
    const auto hot = std::find(row.begin(), row.end(), std::uint8_t{1});
    if (hot != row.end()) out[static_cast<std::size_t>(r)] = static_cast<int>(hot - row.begin());
  }
  return out;
}

std::pair<std::u32string, int> decode_input(const InputMatrix& matrix) {
  std::u32string text;
  int r = 0;
  for (; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    const auto hot = std::max_element(row.begin(), row.end());
    if (*hot == 0) break;
    text.push_back(Alphabet::channel_char(static_cast<int>(hot - row.begin())));
  }
  return {std::move(text), r};
}

std::string_view to_string(DecodeMode mode) {
  return mode == DecodeMode::Constrained ? "constrained" : "raw";
}

DecodeMode parse_decode_mode(std::string_view text) {
  if (text == "constrained") return DecodeMode::Constrained;
  if (text == "raw") return DecodeMode::Raw;
  throw std::invalid_argument("unknown decode mode '" + std::string(text) + "'");
}

template <typename T>
std::size_t decode_position(std::span<const T> scores, std::u32string_view input, DecodeMode mode) {
  if (scores.empty()) throw std::invalid_argument("decode_position: empty scores");
  if (mode == DecodeMode::Raw) {
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  }
  std::size_t best = scores.size();
  const std::size_t limit = std::min(scores.size(), input.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (!Alphabet::is_vowel(input[i])) continue;
    if (best == scores.size() || scores[i] > scores[best]) best = i;
  }
  if (best == scores.size()) {
    throw TextError(TextErrorKind::NoVowel, 0,
                    "constrained decode: '" + to_utf8(input) + "' has no vowel");
  }
  return best;
}

template std::size_t decode_position<float>(std::span<const float>, std::u32string_view, DecodeMode);
template std::size_t decode_position<double>(std::span<const double>, std::u32string_view,
                                             DecodeMode);

}  // namespace accent
