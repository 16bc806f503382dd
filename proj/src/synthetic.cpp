#include "accent/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace accent::synthetic {

namespace {

constexpr std::u32string_view kConsonants = U"бвгджзйклмнпрстфхцчшщ";
constexpr std::u32string_view kPlainVowels = U"аеиоуыэюя";  // ё left out: it would fix the stress

char32_t pick(SplitMix64& rng, std::u32string_view from) {
  return from[static_cast<std::size_t>(rng.below(from.size()))];
}

std::size_t vowel_at(std::u32string_view word, std::size_t ordinal) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (Alphabet::is_vowel(word[i]) && seen++ == ordinal) return i;
  }
  throw std::out_of_range("word has too few vowels");
}

std::size_t between(SplitMix64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

}  // namespace

std::u32string random_word(SplitMix64& rng, std::size_t syllables) {
  std::u32string word;
  for (std::size_t s = 0; s < syllables; ++s) {
    const double onset = rng.uniform();
    const int onset_len = onset < 0.2 ? 0 : (onset < 0.85 ? 1 : 2);
    for (int k = 0; k < onset_len; ++k) word.push_back(pick(rng, kConsonants));
    word.push_back(pick(rng, kPlainVowels));
    if (rng.uniform() < 0.3) word.push_back(pick(rng, kConsonants));
  }
  return word;
}

std::size_t penultimate_vowel(std::u32string_view word) {
  const std::size_t n = count_syllables(word);
  if (n < 2) throw std::invalid_argument("penultimate stress needs two vowels");
  return vowel_at(word, n - 2);
}

std::vector<StressedWord> random_stressed_words(std::size_t count, std::size_t min_syllables,
                                                std::size_t max_syllables, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::set<std::u32string> seen;
  std::vector<StressedWord> out;
  while (out.size() < count) {
    const std::size_t syllables = between(rng, min_syllables, max_syllables);
    std::u32string word = random_word(rng, syllables);
    if (!seen.insert(word).second) continue;
    const std::size_t stress = vowel_at(word, static_cast<std::size_t>(rng.below(syllables)));
    out.push_back(StressedWord::make(std::move(word), stress));
  }
  return out;
}

std::vector<StressedWord> penultimate_stress_words(std::size_t count, std::size_t min_syllables,
                                                   std::size_t max_syllables, std::uint64_t seed) {
  if (min_syllables < 2) throw std::invalid_argument("penultimate stress needs >= 2 syllables");
  SplitMix64 rng(seed);
  std::set<std::u32string> seen;
  std::vector<StressedWord> out;
  while (out.size() < count) {
    std::u32string word = random_word(rng, between(rng, min_syllables, max_syllables));
    if (!seen.insert(word).second) continue;
    const std::size_t stress = penultimate_vowel(word);
    out.push_back(StressedWord::make(std::move(word), stress));
  }
  return out;
}

ContextHomographData context_homographs(const ContextHomographSpec& spec) {
  SplitMix64 rng(spec.seed);
  ContextHomographData data;

  // Two disjoint classes of three-letter endings (consonant-vowel-consonant).
  std::set<std::u32string> used;
  std::vector<std::u32string> classes[2];
  for (auto& cls : classes) {
    while (cls.size() < spec.suffixes_per_variant) {
      std::u32string s{pick(rng, kConsonants), pick(rng, kPlainVowels), pick(rng, kConsonants)};
      if (used.insert(s).second) cls.push_back(s);
    }
  }

  std::set<std::u32string> surfaces;
  struct Surface {
    std::u32string text;
    std::size_t stress[2];
    int class_of_variant[2];
  };
  std::vector<Surface> chosen;
  while (chosen.size() < spec.surfaces) {
    const std::size_t syllables = between(rng, 2, 4);
    std::u32string word = random_word(rng, syllables);
    if (!surfaces.insert(word).second) continue;
    const std::size_t a = static_cast<std::size_t>(rng.below(syllables));
    std::size_t b = static_cast<std::size_t>(rng.below(syllables - 1));
    if (b >= a) ++b;
    const int flip = static_cast<int>(rng.below(2));
    chosen.push_back({word, {vowel_at(word, a), vowel_at(word, b)}, {flip, 1 - flip}});
  }

  for (const auto& s : chosen) {
    HomographPair pair;
    pair.surface = s.text;
    pair.variants = {s.stress[0], s.stress[1]};
    pair.corpus_counts = {0, 0};
    data.pairs.push_back(pair);
    LexemeEntry entry;
    entry.lemma = s.text;
    entry.forms = {StressedWord::make(s.text, s.stress[0]), StressedWord::make(s.text, s.stress[1])};
    data.dictionary.push_back(std::move(entry));
  }

  auto context_word = [&](int cls) {
    const std::u32string& suffix = classes[cls][static_cast<std::size_t>(
        rng.below(classes[cls].size()))];
    std::u32string word = random_word(rng, between(rng, 1, 2)) + suffix;
    // Stress the ending's vowel so context tokens follow a learnable rule too.
    return StressedWord::make(std::move(word), word.size() - 2);
  };
  auto generate = [&](std::vector<CorpusUtterance>& into) {
    for (const auto& s : chosen) {
      for (int v = 0; v < 2; ++v) {
        for (std::size_t k = 0; k < spec.occurrences; ++k) {
          CorpusUtterance u;
          u.tokens.push_back(context_word(s.class_of_variant[v]));
          u.tokens.push_back(StressedWord::make(s.text, s.stress[v]));
          into.push_back(std::move(u));
        }
      }
    }
  };
  generate(data.train);
  generate(data.test);
  return data;
}

std::vector<LexemeEntry> random_lexemes(std::size_t count, std::size_t max_forms,
                                        std::uint64_t seed) {
  static const std::u32string kEndings[] = {U"", U"а", U"у", U"ом", U"е", U"ы", U"ами", U"ах"};
  constexpr std::size_t kEndingCount = std::size(kEndings);
  SplitMix64 rng(seed);
  std::set<std::u32string> seen;
  std::vector<LexemeEntry> out;
  while (out.size() < count) {
    std::u32string lemma = random_word(rng, between(rng, 2, 4));
    if (!seen.insert(lemma).second) continue;
    LexemeEntry entry;
    entry.lemma = lemma;
    const std::size_t forms = between(rng, 1, std::min(max_forms, kEndingCount));
    for (std::size_t f = 0; f < forms; ++f) {
      std::u32string form = lemma + kEndings[f];
      const std::size_t syllables = count_syllables(form);
      const std::size_t stress = vowel_at(form, static_cast<std::size_t>(rng.below(syllables)));
      entry.forms.push_back(StressedWord::make(std::move(form), stress));
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace accent::synthetic
