#pragma once

// One-hot encoding of instances and decoding of output scores to a stress
// position.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "accent/dataset.hpp"

namespace accent {

struct EncodingConfig {
  int max_len = kDefaultMaxLen;
  /// 34 = 33 letters + separator. 33 drops support for context-augmented input.
  int channels = Alphabet::kLetterCount + 1;

  void validate() const;
  friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

/// max_len x channels matrix of {0,1}; row-major.
class InputMatrix {
 public:
  InputMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), 0) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::uint8_t operator()(int r, int c) const { return values_[index(r, c)]; }
  std::uint8_t& operator()(int r, int c) { return values_[index(r, c)]; }
  std::span<const std::uint8_t> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r * cols_), static_cast<std::size_t>(cols_)};
  }

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r * cols_ + c); }

  int rows_;
  int cols_;
  std::vector<std::uint8_t> values_;
};

struct TargetVector {
  std::vector<std::uint8_t> values;
};

struct Encoded {
  InputMatrix input;
  TargetVector target;
  int length = 0;
};

/// Throws InstanceTooLong when the input exceeds max_len.
Encoded encode(const TrainInstance& instance, const EncodingConfig& cfg = {});

/// Compact form of the input matrix: one channel id per character.
std::vector<int> channel_sequence(std::u32string_view input, const EncodingConfig& cfg = {});

/// Channel ids of rows [0, length); an all-zero row yields -1.
std::vector<int> channel_sequence(const InputMatrix& matrix, int length);

/// Recovers (input, length) from a matrix: row-wise argmax up to the first
/// all-zero row.
std::pair<std::u32string, int> decode_input(const InputMatrix& matrix);

enum class DecodeMode { Constrained, Raw };

std::string_view to_string(DecodeMode mode);
DecodeMode parse_decode_mode(std::string_view text);

/// Raw: argmax over all positions. Constrained: argmax over vowel positions of
/// `input`. Ties go to the lowest index. Constrained mode throws
/// TextError(NoVowel) when the input has no vowel.
template <typename T>
std::size_t decode_position(std::span<const T> scores, std::u32string_view input, DecodeMode mode);

extern template std::size_t decode_position<float>(std::span<const float>, std::u32string_view,
                                                   DecodeMode);
extern template std::size_t decode_position<double>(std::span<const double>, std::u32string_view,
                                                    DecodeMode);

}  // namespace accent
