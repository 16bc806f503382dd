#pragma once

// Evaluation artifacts: accuracy bucketed by syllable count with a
// micro-average, homograph extraction from a dictionary, corpus-frequency
// thresholding, and per-pair scoring of one or more models.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "accent/dataset.hpp"
#include "accent/encoder.hpp"
#include "accent/nn/params.hpp"

namespace accent {

/// Bucket key holding every word with this many syllables or more ("10+").
inline constexpr std::size_t kOverflowBucket = 10;

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  /// nullopt when there is nothing to score.
  std::optional<double> accuracy() const noexcept;
  Tally& operator+=(const Tally& other) noexcept;
};

struct SyllableBucketReport {
  /// Keys 1..kOverflowBucket; every key is present.
  std::map<std::size_t, Tally> rows;
  /// Sum correct / sum total; NaN when there are no instances.
  double micro_average = 0.0;

  Tally overall() const noexcept;
};

std::string bucket_label(std::size_t key);

/// An instance with the model's prediction; nullopt marks an instance the
/// model could not encode (scored as incorrect).
struct ScoredInstance {
  TrainInstance instance;
  std::optional<std::size_t> predicted;

  bool correct() const noexcept { return predicted && *predicted == instance.target(); }
};

/// Buckets by the syllable count of the bare word (context prefix excluded).
SyllableBucketReport bucket_accuracy(std::span<const ScoredInstance> results);

std::vector<ScoredInstance> score_instances(const nn::ModelParams<float>& params,
                                            std::span<const TrainInstance> instances,
                                            DecodeMode decode);

// --- homographs --------------------------------------------------------------

struct HomographPair {
  std::u32string surface;
  /// Distinct stress indices, ascending (or by corpus count after thresholding).
  std::vector<std::size_t> variants;
  /// Corpus occurrences per variant, parallel to `variants`.
  std::vector<std::size_t> corpus_counts;

  std::size_t total_count() const noexcept;
};

/// Groups all wordforms by surface and keeps surfaces with two or more
/// stress positions, sorted by surface. Surfaces resolved by a single ё are
/// skipped.
std::vector<HomographPair> extract_homographs(std::span<const LexemeEntry> entries);

enum class ThresholdMode {
  /// Every kept variant must reach min_count.
  PerVariant,
  /// The kept variants together must reach min_count.
  Total,
};

/// Counts variant occurrences in the corpus, keeps the two most frequent
/// variants of each group, applies the threshold, sorts by total count
/// (descending, then surface) and truncates to top_k.
std::vector<HomographPair> threshold_homographs(std::span<const HomographPair> pairs,
                                                std::span<const CorpusUtterance> corpus,
                                                std::size_t min_count, std::size_t top_k,
                                                ThresholdMode mode = ThresholdMode::PerVariant);

struct VariantScore {
  std::size_t stress = 0;
  Tally tally;
};

struct PairScore {
  std::u32string surface;
  std::vector<VariantScore> variants;

  /// Correct over all occurrences of every variant; nullopt when none occur.
  std::optional<double> aggregate() const noexcept;
  Tally overall() const noexcept;
};

struct HomographScore {
  std::string model;
  std::vector<PairScore> pairs;
  /// Bucket report over every homograph occurrence that was scored.
  SyllableBucketReport buckets;
};

/// Scores already-predicted instances against the pairs. An instance counts
/// toward a variant when its bare word equals the surface and its bare
/// target equals the variant's stress index.
HomographScore score_homograph_predictions(std::string model,
                                           std::span<const HomographPair> pairs,
                                           std::span<const ScoredInstance> scored);

struct ModelUnderTest {
  std::string name;
  const nn::ModelParams<float>* params = nullptr;
  /// Test occurrences built in this model's mode.
  std::span<const TrainInstance> instances;
  DecodeMode decode = DecodeMode::Constrained;
};

std::vector<HomographScore> score_homographs(std::span<const HomographPair> pairs,
                                             std::span<const ModelUnderTest> models);

// --- reports -----------------------------------------------------------------

/// "n/a" for undefined values, otherwise fixed with four decimals.
std::string format_accuracy(std::optional<double> value);

void write_bucket_tsv(std::ostream& out, const SyllableBucketReport& report);
std::string bucket_report_json(const SyllableBucketReport& report);

/// One row per variant, then a "pair" row with the aggregate.
void write_homograph_tsv(std::ostream& out, std::span<const HomographScore> scores);
std::string homograph_report_json(std::span<const HomographPair> pairs,
                                  std::span<const HomographScore> scores);

}  // namespace accent
