#pragma once

// Dictionary/corpus parsing, lexeme- and utterance-wise splits, and
// construction of training instances for the three model variants.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "accent/textcore.hpp"

namespace accent {

inline constexpr int kDefaultMaxLen = 40;

/// Which model an instance is built for: bare dictionary forms, bare corpus
/// forms, or corpus forms with a left-context prefix.
enum class Mode { Dict, Cfm, Cdm };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct LexemeEntry {
  std::u32string lemma;
  std::vector<StressedWord> forms;
};

struct CorpusUtterance {
  std::vector<StressedWord> tokens;
};

class InstanceTooLong : public std::runtime_error {
 public:
  InstanceTooLong(std::size_t length, std::size_t max_len);
  std::size_t length() const noexcept { return length_; }
  std::size_t max_len() const noexcept { return max_len_; }

 private:
  std::size_t length_;
  std::size_t max_len_;
};

/// Model input string plus the stress position inside it.
class TrainInstance {
 public:
  static TrainInstance make(std::u32string input, std::size_t target, Mode mode,
                            std::size_t max_len = kDefaultMaxLen);

  const std::u32string& input() const noexcept { return input_; }
  std::size_t target() const noexcept { return target_; }
  Mode mode() const noexcept { return mode_; }

  /// The word itself, without any context prefix.
  std::u32string_view bare_word() const noexcept;
  std::size_t bare_target() const noexcept;

  friend bool operator==(const TrainInstance& a, const TrainInstance& b) {
    return a.input_ == b.input_ && a.target_ == b.target_;
  }
  friend bool operator<(const TrainInstance& a, const TrainInstance& b) {
    return a.input_ != b.input_ ? a.input_ < b.input_ : a.target_ < b.target_;
  }

 private:
  TrainInstance(std::u32string input, std::size_t target, Mode mode)
      : input_(std::move(input)), target_(target), mode_(mode) {}

  std::u32string input_;
  std::size_t target_ = 0;
  Mode mode_ = Mode::Cfm;
};

struct SplitConfig {
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 1;
  /// Share of the train side held out for epoch selection.
  double dev_fraction = 0.05;

  void validate() const;
};

// --- parsing -----------------------------------------------------------------

struct ParseIssue {
  std::size_t line = 0;
  std::string token;
  std::string message;
};

class DatasetParseError : public std::runtime_error {
 public:
  explicit DatasetParseError(ParseIssue issue);
  const ParseIssue& issue() const noexcept { return issue_; }

 private:
  ParseIssue issue_;
};

struct ParseOptions {
  /// Abort on the first bad line; otherwise skip it and record an issue.
  bool strict = true;
};

template <typename T>
struct Parsed {
  std::vector<T> items;
  std::vector<ParseIssue> issues;
};

/// `lemma<TAB>form form ...`, one lexeme per line. Blank lines and lines
/// starting with '#' are ignored.
Parsed<LexemeEntry> parse_dictionary(std::istream& in, ParseOptions options = {});

/// One utterance per line, space-separated stressed tokens. Tokens without a
/// mark are accepted when they have a single vowel or a single ё.
Parsed<CorpusUtterance> parse_corpus(std::istream& in, ParseOptions options = {});

StressedWord parse_corpus_token(std::u32string_view token);

// --- splitting ---------------------------------------------------------------

/// Keyed 64-bit hash used for reproducible partitioning.
std::uint64_t keyed_hash(std::string_view bytes, std::uint64_t seed) noexcept;

/// True when the hash falls in the train share.
bool assign_to_train(std::uint64_t hash, double train_fraction) noexcept;

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

Split<LexemeEntry> split_dictionary(std::span<const LexemeEntry> entries, const SplitConfig& cfg);
Split<CorpusUtterance> split_corpus(std::span<const CorpusUtterance> utterances,
                                    const SplitConfig& cfg);

/// Carves the dev share off a train side with a seed distinct from the
/// train/test split.
Split<LexemeEntry> carve_dev(std::span<const LexemeEntry> train, const SplitConfig& cfg);
Split<CorpusUtterance> carve_dev(std::span<const CorpusUtterance> train, const SplitConfig& cfg);

// --- instances ---------------------------------------------------------------

/// Previous-word prefix: the whole word when shorter than three letters,
/// otherwise its last three.
std::u32string_view context_prefix(std::u32string_view prev) noexcept;

TrainInstance augment_context(std::optional<std::u32string_view> prev, const StressedWord& current,
                              std::size_t max_len = kDefaultMaxLen);

struct InstanceStats {
  std::size_t candidates = 0;
  std::size_t duplicates_removed = 0;
  std::size_t too_long = 0;
};

struct InstanceSet {
  std::vector<TrainInstance> instances;
  InstanceStats stats;
};

/// Bare wordforms of every lexeme, deduplicated and sorted.
InstanceSet build_instances(std::span<const LexemeEntry> entries,
                            std::size_t max_len = kDefaultMaxLen);

/// CFM (bare) or CDM (context-augmented) instances, deduplicated and sorted.
InstanceSet build_instances(std::span<const CorpusUtterance> utterances, Mode mode,
                            std::size_t max_len = kDefaultMaxLen);

/// Every token occurrence in corpus order, without deduplication. Too-long
/// instances are dropped and counted.
InstanceSet corpus_occurrences(std::span<const CorpusUtterance> utterances, Mode mode,
                               std::size_t max_len = kDefaultMaxLen);

/// `input<TAB>target` lines.
std::vector<TrainInstance> read_instances(std::istream& in, Mode mode,
                                          std::size_t max_len = kDefaultMaxLen);
void write_instances(std::ostream& out, std::span<const TrainInstance> instances);

}  // namespace accent
