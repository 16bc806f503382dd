#pragma once

// Seeded generators for synthetic stress data: random Russian-looking words,
// a fixed-rule stress language, a context-determined homograph corpus and
// bulk lexeme inventories. Used by the acceptance suite, gradcheck and the
// benchmarks.

#include <cstdint>
#include <vector>

#include "accent/dataset.hpp"
#include "accent/eval.hpp"
#include "accent/rng.hpp"

namespace accent::synthetic {

/// Letters of (C)(C)V(C) syllables; the word has exactly `syllables` vowels.
std::u32string random_word(SplitMix64& rng, std::size_t syllables);

/// `count` distinct words of min..max syllables, stress on a random vowel.
std::vector<StressedWord> random_stressed_words(std::size_t count, std::size_t min_syllables,
                                                std::size_t max_syllables, std::uint64_t seed);

/// `count` distinct words of min..max syllables (min >= 2) stressed on the
/// penultimate vowel.
std::vector<StressedWord> penultimate_stress_words(std::size_t count, std::size_t min_syllables,
                                                   std::size_t max_syllables, std::uint64_t seed);

/// Index of the second-to-last vowel; the word must have at least two.
std::size_t penultimate_vowel(std::u32string_view word);

struct ContextHomographSpec {
  std::size_t surfaces = 30;
  /// Distinct three-letter context endings that select each variant.
  std::size_t suffixes_per_variant = 6;
  /// Occurrences of each (surface, variant) per generated corpus.
  std::size_t occurrences = 12;
  std::uint64_t seed = 1;
};

struct ContextHomographData {
  /// surface, stress of variant 0, stress of variant 1
  std::vector<HomographPair> pairs;
  /// Each utterance is "context surface". Train and test use independent
  /// context words drawn from the same suffix classes; every surface occurs
  /// equally often with each variant.
  std::vector<CorpusUtterance> train;
  std::vector<CorpusUtterance> test;
  /// Dictionary listing every variant of every surface.
  std::vector<LexemeEntry> dictionary;
};

ContextHomographData context_homographs(const ContextHomographSpec& spec);

/// Lexemes with distinct random lemmas and 1..max_forms stressed forms each.
std::vector<LexemeEntry> random_lexemes(std::size_t count, std::size_t max_forms,
                                        std::uint64_t seed);

}  // namespace accent::synthetic
