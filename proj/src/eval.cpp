#include "accent/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "accent/trainer.hpp"
#include "json.hpp"

namespace accent {

using nlohmann::json;

std::optional<double> Tally::accuracy() const noexcept {
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

Tally& Tally::operator+=(const Tally& other) noexcept {
  correct += other.correct;
  total += other.total;
  return *this;
}

Tally SyllableBucketReport::overall() const noexcept {
  Tally sum;
  for (const auto& [key, tally] : rows) sum += tally;
  return sum;
}

std::string bucket_label(std::size_t key) {
  return key >= kOverflowBucket ? std::to_string(kOverflowBucket) + "+" : std::to_string(key);
}

SyllableBucketReport bucket_accuracy(std::span<const ScoredInstance> results) {
  SyllableBucketReport report;
  for (std::size_t key = 1; key <= kOverflowBucket; ++key) report.rows[key] = Tally{};
  for (const auto& r : results) {
    const std::size_t syllables = std::clamp<std::size_t>(count_syllables(r.instance.bare_word()), 1,
                                                          kOverflowBucket);
    auto& tally = report.rows[syllables];
    ++tally.total;
    if (r.correct()) ++tally.correct;
  }
  report.micro_average =
      report.overall().accuracy().value_or(std::numeric_limits<double>::quiet_NaN());
  return report;
}

std::vector<ScoredInstance> score_instances(const nn::ModelParams<float>& params,
                                            std::span<const TrainInstance> instances,
                                            DecodeMode decode) {
  const auto predicted = predict_positions(params, instances, decode);
  std::vector<ScoredInstance> scored;
  scored.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) scored.push_back({instances[i], predicted[i]});
  return scored;
}

std::size_t HomographPair::total_count() const noexcept {
  return std::accumulate(corpus_counts.begin(), corpus_counts.end(), std::size_t{0});
}

std::vector<HomographPair> extract_homographs(std::span<const LexemeEntry> entries) {
  std::map<std::u32string, std::vector<std::size_t>> by_surface;
  for (const auto& entry : entries) {
    for (const auto& form : entry.forms) by_surface[form.chars()].push_back(form.stress());
  }
  std::vector<HomographPair> pairs;
  for (auto& [surface, stresses] : by_surface) {
    std::sort(stresses.begin(), stresses.end());
    stresses.erase(std::unique(stresses.begin(), stresses.end()), stresses.end());
    if (stresses.size() < 2) continue;
    if (yo_override(surface)) continue;
    HomographPair pair;
    pair.surface = surface;
    pair.variants = stresses;
    pair.corpus_counts.assign(stresses.size(), 0);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<HomographPair> threshold_homographs(std::span<const HomographPair> pairs,
                                                std::span<const CorpusUtterance> corpus,
                                                std::size_t min_count, std::size_t top_k,
                                                ThresholdMode mode) {
  std::unordered_map<std::u32string, std::size_t> wanted;
  for (std::size_t i = 0; i < pairs.size(); ++i) wanted.emplace(pairs[i].surface, i);

  std::vector<std::map<std::size_t, std::size_t>> counts(pairs.size());
  for (const auto& utterance : corpus) {
    for (const auto& token : utterance.tokens) {
      const auto it = wanted.find(token.chars());
      if (it != wanted.end()) ++counts[it->second][token.stress()];
    }
  }

  std::vector<HomographPair> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (stress, count)
    for (std::size_t stress : pairs[i].variants) {
      const auto c = counts[i].find(stress);
      ranked.emplace_back(stress, c == counts[i].end() ? 0 : c->second);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > 2) ranked.resize(2);

    std::size_t total = 0;
    bool each = true;
    for (const auto& [stress, c] : ranked) {
      total += c;
      each = each && c >= min_count;
    }
    if (mode == ThresholdMode::PerVariant ? !each : total < min_count) continue;

    HomographPair pair;
    pair.surface = pairs[i].surface;
    for (const auto& [stress, c] : ranked) {
      pair.variants.push_back(stress);
      pair.corpus_counts.push_back(c);
    }
    kept.push_back(std::move(pair));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const HomographPair& a, const HomographPair& b) {
    const auto ta = a.total_count();
    const auto tb = b.total_count();
    return ta != tb ? ta > tb : a.surface < b.surface;
  });
  if (kept.size() > top_k) kept.resize(top_k);
  return kept;
}

std::optional<double> PairScore::aggregate() const noexcept { return overall().accuracy(); }

Tally PairScore::overall() const noexcept {
  Tally sum;
  for (const auto& v : variants) sum += v.tally;
  return sum;
}

HomographScore score_homograph_predictions(std::string model,
                                           std::span<const HomographPair> pairs,
                                           std::span<const ScoredInstance> scored) {
  HomographScore score;
  score.model = std::move(model);
  std::unordered_map<std::u32string, std::size_t> index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    index.emplace(pairs[i].surface, i);
    PairScore p;
    p.surface = pairs[i].surface;
    for (std::size_t stress : pairs[i].variants) p.variants.push_back({stress, {}});
    score.pairs.push_back(std::move(p));
  }
  std::vector<ScoredInstance> matched;
  for (const auto& s : scored) {
    const auto it = index.find(std::u32string(s.instance.bare_word()));
    if (it == index.end()) continue;
    auto& variants = score.pairs[it->second].variants;
    const auto v = std::find_if(variants.begin(), variants.end(), [&](const VariantScore& vs) {
      return vs.stress == s.instance.bare_target();
    });
    if (v == variants.end()) continue;
    ++v->tally.total;
    if (s.correct()) ++v->tally.correct;
    matched.push_back(s);
  }
  score.buckets = bucket_accuracy(matched);
  return score;
}

std::vector<HomographScore> score_homographs(std::span<const HomographPair> pairs,
                                             std::span<const ModelUnderTest> models) {
  std::vector<HomographScore> scores;
  for (const auto& m : models) {
    if (m.params == nullptr) throw std::invalid_argument("model '" + m.name + "' has no parameters");
    const auto scored = score_instances(*m.params, m.instances, m.decode);
    scores.push_back(score_homograph_predictions(m.name, pairs, scored));
  }
  return scores;
}

std::string format_accuracy(std::optional<double> value) {
  if (!value || std::isnan(*value)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *value);
  return buf;
}

namespace {

std::string of_total(const Tally& t) {
  return std::to_string(t.correct) + " of " + std::to_string(t.total);
}

json accuracy_json(std::optional<double> value) {
  if (!value || std::isnan(*value)) return "n/a";
  return *value;
}

json bucket_json(const SyllableBucketReport& report) {
  json rows = json::array();
  for (const auto& [key, tally] : report.rows) {
    rows.push_back({{"syllables", bucket_label(key)},
                    {"correct", tally.correct},
                    {"total", tally.total},
                    {"accuracy", accuracy_json(tally.accuracy())}});
  }
  const Tally all = report.overall();
  return {{"rows", std::move(rows)},
          {"correct", all.correct},
          {"total", all.total},
          {"micro_average", accuracy_json(report.micro_average)}};
}

}  // namespace

void write_bucket_tsv(std::ostream& out, const SyllableBucketReport& report) {
  out << "syllables\taccuracy\tcorrect\n";
  for (const auto& [key, tally] : report.rows) {
    if (tally.total == 0) continue;
    out << bucket_label(key) << '\t' << format_accuracy(tally.accuracy()) << '\t' << of_total(tally)
        << '\n';
  }
  out << "micro-average\t" << format_accuracy(report.micro_average) << '\t'
      << of_total(report.overall()) << '\n';
}

std::string bucket_report_json(const SyllableBucketReport& report) {
  return bucket_json(report).dump(2);
}

void write_homograph_tsv(std::ostream& out, std::span<const HomographScore> scores) {
  out << "model\twordform\trow\taccuracy\tcorrect\n";
  for (const auto& score : scores) {
    for (const auto& pair : score.pairs) {
      for (const auto& v : pair.variants) {
        const auto word = StressedWord::make(pair.surface, v.stress);
        out << score.model << '\t' << to_utf8(format_stress_mark(word)) << "\tvariant\t"
            << format_accuracy(v.tally.accuracy()) << '\t' << of_total(v.tally) << '\n';
      }
      out << score.model << '\t' << to_utf8(pair.surface) << "\tpair\t"
          << format_accuracy(pair.aggregate()) << '\t' << of_total(pair.overall()) << '\n';
    }
  }
}

std::string homograph_report_json(std::span<const HomographPair> pairs,
                                  std::span<const HomographScore> scores) {
  json jpairs = json::array();
  for (const auto& p : pairs) {
    json variants = json::array();
    for (std::size_t i = 0; i < p.variants.size(); ++i) {
      variants.push_back(
          {{"wordform", to_utf8(format_stress_mark(StressedWord::make(p.surface, p.variants[i])))},
           {"stress", p.variants[i]},
           {"corpus_count", i < p.corpus_counts.size() ? p.corpus_counts[i] : 0}});
    }
    jpairs.push_back({{"surface", to_utf8(p.surface)}, {"variants", std::move(variants)}});
  }
  json jmodels = json::array();
  for (const auto& s : scores) {
    json jscored = json::array();
    for (const auto& pair : s.pairs) {
      json variants = json::array();
      for (const auto& v : pair.variants) {
        variants.push_back({{"stress", v.stress},
                            {"correct", v.tally.correct},
                            {"total", v.tally.total},
                            {"accuracy", accuracy_json(v.tally.accuracy())}});
      }
      jscored.push_back({{"surface", to_utf8(pair.surface)},
                         {"variants", std::move(variants)},
                         {"pair_accuracy", accuracy_json(pair.aggregate())}});
    }
    jmodels.push_back(
        {{"model", s.model}, {"pairs", std::move(jscored)}, {"buckets", bucket_json(s.buckets)}});
  }
  return json{{"pairs", std::move(jpairs)}, {"models", std::move(jmodels)}}.dump(2);
}

}  // namespace accent
