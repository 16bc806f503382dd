#include "accent/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "accent/rng.hpp"

namespace accent {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Dict: return "dict";
    case Mode::Cfm: return "cfm";
    case Mode::Cdm: return "cdm";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "dict") return Mode::Dict;
  if (text == "cfm") return Mode::Cfm;
  if (text == "cdm") return Mode::Cdm;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected dict|cfm|cdm)");
}

InstanceTooLong::InstanceTooLong(std::size_t length, std::size_t max_len)
    : std::runtime_error("instance of length " + std::to_string(length) + " exceeds max_len " +
                         std::to_string(max_len)),
      length_(length),
      max_len_(max_len) {}

TrainInstance TrainInstance::make(std::u32string input, std::size_t target, Mode mode,
                                  std::size_t max_len) {
  if (input.empty()) throw TextError(TextErrorKind::EmptyInput, 0, "empty instance");
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!Alphabet::channel(input[i])) {
      throw TextError(TextErrorKind::IllegalCharacter, i,
                      "illegal character at position " + std::to_string(i) + " of instance '" +
                          to_utf8(input) + "'");
    }
  }
  if (target >= input.size() || !Alphabet::is_vowel(input[target])) {
    throw TextError(TextErrorKind::StressOnConsonant, target,
                    "target " + std::to_string(target) + " is not a vowel of '" + to_utf8(input) +
                        "'");
  }
  if (input.size() > max_len) throw InstanceTooLong(input.size(), max_len);
  return TrainInstance(std::move(input), target, mode);
}

std::u32string_view TrainInstance::bare_word() const noexcept {
  const auto sep = input_.find(kSeparator);
  std::u32string_view view = input_;
  return sep == std::u32string::npos ? view : view.substr(sep + 1);
}

std::size_t TrainInstance::bare_target() const noexcept {
  const auto sep = input_.find(kSeparator);
  return sep == std::u32string::npos ? target_ : target_ - sep - 1;
}

void SplitConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw std::invalid_argument("dev_fraction must lie in (0, 1)");
  }
}

DatasetParseError::DatasetParseError(ParseIssue issue)
    : std::runtime_error("line " + std::to_string(issue.line) +
                         (issue.token.empty() ? std::string() : ", token '" + issue.token + "'") +
                         ": " + issue.message),
      issue_(std::move(issue)) {}

namespace {

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

std::vector<std::u32string> split_ws(std::u32string_view text) {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == U' ' || text[i] == U'\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != U' ' && text[j] != U'\t') ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
struct LineResult {
  std::optional<T> value;
  std::optional<ParseIssue> issue;
};

// Lines parse independently; results are merged in line order so the outcome
// does not depend on the schedule.
template <typename T, typename Fn>
Parsed<T> parse_lines(std::istream& in, ParseOptions options, Fn parse_line) {
  const std::vector<std::string> lines = read_lines(in);
  std::vector<LineResult<T>> results(lines.size());
  const auto n = static_cast<std::ptrdiff_t>(lines.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& line = lines[static_cast<std::size_t>(i)];
    if (skippable(line)) continue;
    results[static_cast<std::size_t>(i)] = parse_line(line, static_cast<std::size_t>(i) + 1);
  }
  Parsed<T> parsed;
  for (auto& r : results) {
    if (r.issue) {
      if (options.strict) throw DatasetParseError(*r.issue);
      parsed.issues.push_back(std::move(*r.issue));
    } else if (r.value) {
      parsed.items.push_back(std::move(*r.value));
    }
  }
  return parsed;
}

}  // namespace

Parsed<LexemeEntry> parse_dictionary(std::istream& in, ParseOptions options) {
  return parse_lines<LexemeEntry>(in, options, [](const std::string& line, std::size_t number) {
    LineResult<LexemeEntry> result;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      result.issue = ParseIssue{number, "", "expected 'lemma<TAB>forms', found no TAB"};
      return result;
    }
    std::string token;
    try {
      LexemeEntry entry;
      token = line.substr(0, tab);
      entry.lemma = normalize(std::string_view(token));
      for (const auto& form : split_ws(from_utf8(std::string_view(line).substr(tab + 1)))) {
        token = to_utf8(form);
        entry.forms.push_back(parse_stress_mark(std::u32string_view(form)));
      }
      if (entry.forms.empty()) {
        result.issue = ParseIssue{number, "", "lexeme has no forms"};
        return result;
      }
      result.value = std::move(entry);
    } catch (const TextError& e) {
      result.issue = ParseIssue{number, token, std::string(to_string(e.kind())) + ": " + e.what()};
    }
    return result;
  });
}

StressedWord parse_corpus_token(std::u32string_view token) {
  if (token.find(kStressMark) != std::u32string_view::npos) return parse_stress_mark(token);
  std::u32string chars = normalize(token);
  const std::size_t vowels = count_syllables(chars);
  if (vowels == 1) {
    const auto at = std::find_if(chars.begin(), chars.end(),
                                 [](char32_t c) { return Alphabet::is_vowel(c); });
    const auto stress = static_cast<std::size_t>(at - chars.begin());
    return StressedWord::make(std::move(chars), stress);
  }
  if (const auto yo = yo_override(chars)) return StressedWord::make(std::move(chars), *yo);
  if (vowels == 0) {
    throw TextError(TextErrorKind::NoVowel, 0, "token '" + to_utf8(token) + "' has no vowel");
  }
  throw TextError(TextErrorKind::NoStressMark, 0,
                  "no stress mark in polysyllabic token '" + to_utf8(token) + "'");
}

Parsed<CorpusUtterance> parse_corpus(std::istream& in, ParseOptions options) {
  return parse_lines<CorpusUtterance>(in, options, [](const std::string& line, std::size_t number) {
    LineResult<CorpusUtterance> result;
    std::string token;
    try {
      CorpusUtterance utterance;
      for (const auto& raw : split_ws(from_utf8(line))) {
        token = to_utf8(raw);
        utterance.tokens.push_back(parse_corpus_token(raw));
      }
      if (!utterance.tokens.empty()) result.value = std::move(utterance);
    } catch (const TextError& e) {
      result.issue = ParseIssue{number, token, std::string(to_string(e.kind())) + ": " + e.what()};
    }
    return result;
  });
}

namespace {

constexpr std::uint64_t kDevSalt = 0x6465762D73706C74ULL;

std::string utterance_key(const CorpusUtterance& utterance, std::size_t index) {
  std::string key;
  for (const auto& token : utterance.tokens) {
    key += to_utf8(format_stress_mark(token));
    key.push_back(' ');
  }
  key += '#';
  key += std::to_string(index);
  return key;
}

template <typename T, typename KeyFn>
Split<T> partition(std::span<const T> items, double train_fraction, std::uint64_t seed,
                   KeyFn key) {
  Split<T> split;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (assign_to_train(keyed_hash(key(items[i], i), seed), train_fraction)) {
      split.train.push_back(items[i]);
    } else {
      split.test.push_back(items[i]);
    }
  }
  return split;
}

std::string lemma_key(const LexemeEntry& entry, std::size_t) { return to_utf8(entry.lemma); }

}  // namespace

std::uint64_t keyed_hash(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a offset basis
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(h ^ mix64(seed));
}

bool assign_to_train(std::uint64_t hash, double train_fraction) noexcept {
  const double u = static_cast<double>(hash >> 11) * 0x1.0p-53;
  return u < train_fraction;
}

Split<LexemeEntry> split_dictionary(std::span<const LexemeEntry> entries, const SplitConfig& cfg) {
  cfg.validate();
  if (entries.empty()) throw std::invalid_argument("split_dictionary: no entries");
  return partition(entries, cfg.train_fraction, cfg.seed, lemma_key);
}

Split<CorpusUtterance> split_corpus(std::span<const CorpusUtterance> utterances,
                                    const SplitConfig& cfg) {
  cfg.validate();
  if (utterances.empty()) throw std::invalid_argument("split_corpus: no utterances");
  return partition(utterances, cfg.train_fraction, cfg.seed, utterance_key);
}

Split<LexemeEntry> carve_dev(std::span<const LexemeEntry> train, const SplitConfig& cfg) {
  cfg.validate();
  return partition(train, 1.0 - cfg.dev_fraction, mix64(cfg.seed ^ kDevSalt), lemma_key);
}

Split<CorpusUtterance> carve_dev(std::span<const CorpusUtterance> train, const SplitConfig& cfg) {
  cfg.validate();
  return partition(train, 1.0 - cfg.dev_fraction, mix64(cfg.seed ^ kDevSalt), utterance_key);
}

std::u32string_view context_prefix(std::u32string_view prev) noexcept {
  return prev.size() < 3 ? prev : prev.substr(prev.size() - 3);
}

TrainInstance augment_context(std::optional<std::u32string_view> prev, const StressedWord& current,
                              std::size_t max_len) {
  if (!prev) return TrainInstance::make(current.chars(), current.stress(), Mode::Cdm, max_len);
  const std::u32string_view prefix = context_prefix(*prev);
  std::u32string input(prefix);
  input.push_back(kSeparator);
  input += current.chars();
  return TrainInstance::make(std::move(input), current.stress() + prefix.size() + 1, Mode::Cdm,
                             max_len);
}

namespace {

void sort_unique(InstanceSet& set) {
  auto& v = set.instances;
  std::sort(v.begin(), v.end());
  const auto before = v.size();
  v.erase(std::unique(v.begin(), v.end()), v.end());
  set.stats.duplicates_removed = before - v.size();
}

}  // namespace

InstanceSet build_instances(std::span<const LexemeEntry> entries, std::size_t max_len) {
  InstanceSet set;
  for (const auto& entry : entries) {
    for (const auto& form : entry.forms) {
      ++set.stats.candidates;
      try {
        set.instances.push_back(TrainInstance::make(form.chars(), form.stress(), Mode::Dict, max_len));
      } catch (const InstanceTooLong&) {
        ++set.stats.too_long;
      }
    }
  }
  sort_unique(set);
  return set;
}

InstanceSet corpus_occurrences(std::span<const CorpusUtterance> utterances, Mode mode,
                               std::size_t max_len) {
  if (mode == Mode::Dict) throw std::invalid_argument("corpus instances need mode cfm or cdm");
  InstanceSet set;
  for (const auto& utterance : utterances) {
    const StressedWord* prev = nullptr;
    for (const auto& token : utterance.tokens) {
      ++set.stats.candidates;
      try {
        if (mode == Mode::Cdm) {
          std::optional<std::u32string_view> context;
          if (prev) context = prev->chars();
          set.instances.push_back(augment_context(context, token, max_len));
        } else {
          set.instances.push_back(
              TrainInstance::make(token.chars(), token.stress(), Mode::Cfm, max_len));
        }
      } catch (const InstanceTooLong&) {
        ++set.stats.too_long;
      }
      prev = &token;
    }
  }
  return set;
}

InstanceSet build_instances(std::span<const CorpusUtterance> utterances, Mode mode,
                            std::size_t max_len) {
  InstanceSet set = corpus_occurrences(utterances, mode, max_len);
  sort_unique(set);
  return set;
}

std::vector<TrainInstance> read_instances(std::istream& in, Mode mode, std::size_t max_len) {
  std::vector<TrainInstance> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DatasetParseError({number, "", "expected 'input<TAB>target'"});
    }
    std::size_t target = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [end, ec] = std::from_chars(first, last, target);
    if (ec != std::errc() || end != last) {
      throw DatasetParseError({number, line.substr(tab + 1), "target is not an integer"});
    }
    try {
      out.push_back(TrainInstance::make(normalize(std::string_view(line).substr(0, tab)), target,
                                        mode, max_len));
    } catch (const std::exception& e) {
      throw DatasetParseError({number, line.substr(0, tab), e.what()});
    }
  }
  return out;
}

void write_instances(std::ostream& out, std::span<const TrainInstance> instances) {
  for (const auto& instance : instances) {
    out << to_utf8(instance.input()) << '\t' << instance.target() << '\n';
  }
}

}  // namespace accent
