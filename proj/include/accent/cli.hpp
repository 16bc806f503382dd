#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests can drive it in-process with string streams.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accent/encoder.hpp"
#include "accent/nn/params.hpp"

namespace accent::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // bad flags, unreadable or malformed input
  kExitNumeric = 2,  // training produced non-finite values
  kExitCheck = 3,    // gradient check failed
};

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, printed as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct AccentOptions {
  bool context = false;
  bool yo_rule = true;
  bool monosyllable_shortcut = true;
  DecodeMode decode = DecodeMode::Constrained;
};

/// Places stress marks in running text one line at a time. Context is the
/// previous alphabetic token on the same line and resets at each line. A
/// stressed ё is left unmarked; tokens that already carry a mark are copied.
class Annotator {
 public:
  using Warn = std::function<void(const std::string&)>;

  Annotator(const nn::ModelParams<float>& params, AccentOptions options, Warn warn = {});

  /// `line` without its terminating newline; whitespace is preserved.
  std::string annotate_line(std::string_view line);

  /// Stress index within `word` (lowercase letters only), or nullopt when
  /// the token has no vowel or is too long for the model.
  std::optional<std::size_t> stress_for(std::u32string_view word,
                                        std::optional<std::u32string_view> previous);

  /// Number of tokens that went through the network.
  std::size_t model_calls() const noexcept { return model_calls_; }

 private:
  const nn::ModelParams<float>& params_;
  AccentOptions options_;
  Warn warn_;
  std::size_t model_calls_ = 0;
};

}  // namespace accent::cli
