// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset; exits non-zero if any selected criterion fails.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accent/cli.hpp"
#include "accent/dataset.hpp"
#include "accent/encoder.hpp"
#include "accent/eval.hpp"
#include "accent/modelio.hpp"
#include "accent/synthetic.hpp"
#include "accent/trainer.hpp"

using namespace accent;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<TrainInstance> dict_instances(std::span<const StressedWord> words) {
  std::vector<TrainInstance> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(TrainInstance::make(w.chars(), w.stress(), Mode::Dict));
  return out;
}

Outcome gradient_exactness() {
  const auto start = Clock::now();
  const char* argv[] = {"accent",     "gradcheck", "--hidden",    "8",  "--maxlen",
                        "12",         "--tolerance", "1e-3",      "--instances", "20"};
  std::istringstream in;
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(std::size(argv)), argv, in, out, err);
  const double secs = seconds_since(start);
  std::string worst = "?";
  if (const auto pos = out.str().rfind("max_rel_error"); pos != std::string::npos) {
    double max_err = 0.0;
    std::istringstream lines(out.str());
    std::string line;
    while (std::getline(lines, line)) {
      if (const auto p = line.find("max_rel_error "); p != std::string::npos) {
        max_err = std::max(max_err, std::stod(line.substr(p + 14)));
      }
    }
    worst = fmt("%.2e", max_err);
  }
  return {code == cli::kExitOk && secs < 60.0,
          fmt("exit %d, worst relative error %s, %.1fs (limit 60s)", code, worst.c_str(), secs)};
}

Outcome memorization() {
  const auto start = Clock::now();
  const auto words = synthetic::random_stressed_words(200, 1, 4, 2024);
  const auto set = dict_instances(words);
  TrainRunConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 32;
  cfg.seed = 2;
  cfg.adam.learning_rate = 5e-3;
  cfg.model_tag = ModelTag::DictM;
  double reached = 0.0;
  int first_epoch = 0;
  const auto result = train(set, set, cfg, [&](const EpochRecord& r) {
    if (r.dev_accuracy >= 0.99 && first_epoch == 0) first_epoch = r.epoch;
    reached = std::max(reached, r.dev_accuracy);
  });
  const double acc = evaluate_accuracy(result.best, set, DecodeMode::Constrained).accuracy();
  const double secs = seconds_since(start);
  return {acc >= 0.99 && secs < 300.0,
          fmt("accuracy %.4f (best epoch %d, first >= 0.99 at epoch %d), %.1fs (limit 300s)", acc,
              result.best_epoch, first_epoch, secs)};
}

Outcome synthetic_language() {
  const auto start = Clock::now();
  const auto words = synthetic::penultimate_stress_words(25000, 3, 8, 77);
  const std::span<const StressedWord> all(words);
  const auto train_set = dict_instances(all.first(20000));
  const auto test_set = dict_instances(all.subspan(20000));
  // Epoch selection on a slice of the training words; the 5,000 test words stay unseen.
  const std::vector<TrainInstance> dev(train_set.begin(), train_set.begin() + 1000);

  TrainRunConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 64;
  cfg.seed = 3;
  cfg.adam.learning_rate = 3e-3;
  cfg.model_tag = ModelTag::CFM;
  cfg.arch.encoding.max_len = 32;
  const auto result = train(train_set, dev, cfg);
  const auto acc = evaluate_accuracy(result.best, test_set, DecodeMode::Constrained);

  // the generating rule itself as an oracle over the test words
  std::size_t oracle = 0;
  for (const auto& t : test_set) oracle += synthetic::penultimate_vowel(t.input()) == t.target();

  const double secs = seconds_since(start);
  return {acc.accuracy() >= 0.98 && oracle == test_set.size() && secs < 1800.0,
          fmt("test accuracy %.4f (%zu of %zu unseen), best epoch %d, %.1fs (limit 1800s)",
              acc.accuracy(), acc.correct, acc.total, result.best_epoch, secs)};
}

double homograph_accuracy(const nn::ModelParams<float>& params, Mode mode,
                          const synthetic::ContextHomographData& data) {
  auto occ = corpus_occurrences(data.test, mode, static_cast<std::size_t>(params.arch.encoding.max_len));
  std::set<std::u32string> surfaces;
  for (const auto& p : data.pairs) surfaces.insert(p.surface);
  std::erase_if(occ.instances,
                [&](const TrainInstance& t) { return !surfaces.contains(std::u32string(t.bare_word())); });
  const std::vector<ModelUnderTest> models = {{"m", &params, occ.instances, DecodeMode::Constrained}};
  const auto scores = score_homographs(data.pairs, models);
  return scores[0].buckets.overall().accuracy().value_or(0.0);
}

Outcome context_advantage() {
  const auto start = Clock::now();
  synthetic::ContextHomographSpec spec;
  spec.surfaces = 30;
  spec.seed = 11;
  const auto data = synthetic::context_homographs(spec);

  auto run = [&](Mode mode) {
    const auto set = build_instances(data.train, mode).instances;
    TrainRunConfig cfg;
    cfg.epochs = 60;
    cfg.batch_size = 32;
    cfg.seed = 4;
    cfg.adam.learning_rate = 5e-3;
    cfg.model_tag = tag_for_mode(mode);
    const auto result = train(set, set, cfg);
    return homograph_accuracy(result.best, mode, data);
  };
  const double cdm = run(Mode::Cdm);
  const double cfm = run(Mode::Cfm);
  const double secs = seconds_since(start);
  return {cdm >= 0.95 && cdm > cfm && cfm <= 0.52,
          fmt("CDM %.4f (need >= 0.95), CFM %.4f (need <= 0.52 and below CDM), %.1fs", cdm, cfm, secs)};
}

Outcome context_examples() {
  const auto a = augment_context(std::u32string_view(U"те"), parse_stress_mark(std::string_view("облака́")));
  const auto b =
      augment_context(std::u32string_view(from_utf8("белого")), parse_stress_mark(std::string_view("о́блака")));
  const bool ok = to_utf8(a.input()) == "те_облака" && a.target() == 8 && to_utf8(b.input()) == "ого_облака" &&
                  b.target() == 4 && a.mode() == Mode::Cdm && a.bare_target() == 5 && b.bare_target() == 0;
  return {ok, fmt("(%s, %zu) and (%s, %zu)", to_utf8(a.input()).c_str(), a.target(), to_utf8(b.input()).c_str(),
                  b.target())};
}

Outcome evaluation_oracle() {
  SplitMix64 rng(606);
  std::size_t mismatches = 0;
  for (int set = 0; set < 1000; ++set) {
    const auto words = synthetic::random_stressed_words(1 + rng.below(60), 1, 12, rng());
    std::vector<ScoredInstance> results;
    std::size_t correct = 0;
    for (const auto& w : words) {
      std::optional<std::size_t> pred;
      const auto roll = rng.below(10);
      if (roll < 6) {
        pred = w.stress();
      } else if (roll < 9) {
        pred = rng.below(w.size());
      }
      correct += pred == w.stress();
      results.push_back({TrainInstance::make(w.chars(), w.stress(), Mode::Dict), pred});
    }
    const auto report = bucket_accuracy(results);
    const Tally t = report.overall();
    // correct/total equals flat_correct/flat_total as rationals
    const bool same = t.correct * words.size() == correct * t.total && t.total == words.size() &&
                      report.micro_average == static_cast<double>(correct) / static_cast<double>(words.size());
    mismatches += !same;
  }
  return {mismatches == 0, fmt("%zu of 1000 prediction sets disagree with the flat recount", mismatches)};
}

Outcome split_soundness() {
  const auto lexemes = synthetic::random_lexemes(30000, 8, 7);
  const auto split = split_dictionary(lexemes, SplitConfig{});
  std::set<std::u32string> train_lemmas;
  for (const auto& e : split.train) train_lemmas.insert(e.lemma);
  std::size_t shared = 0;
  for (const auto& e : split.test) shared += train_lemmas.contains(e.lemma);
  const double share = static_cast<double>(split.train.size()) / static_cast<double>(lexemes.size());
  const bool ok = shared == 0 && split.train.size() + split.test.size() == lexemes.size() &&
                  std::abs(share - 2.0 / 3.0) <= 0.02;
  return {ok, fmt("train share %.4f (need 0.6667 +- 0.02), %zu lemmas on both sides", share, shared)};
}

Outcome serialization() {
  nn::Architecture arch;
  arch.hidden = 16;
  auto params = nn::init_params<float>(arch, 8);
  params.weights.flat()[0] = -0.0f;
  params.weights.flat()[1] = std::numeric_limits<float>::denorm_min();
  std::ostringstream saved;
  save_model(saved, params, {ModelTag::CDM, "0123456789abcdef"});
  const std::string bytes = saved.str();

  std::istringstream in(bytes);
  const auto loaded = load_model(in);
  const bool exact = loaded.params.arch == arch &&
                     std::memcmp(loaded.params.weights.flat().data(), params.weights.flat().data(),
                                 params.weights.flat().size_bytes()) == 0;

  auto kind_of = [](const std::string& b) -> std::optional<ModelIoErrorKind> {
    std::istringstream s(b);
    try {
      load_model(s);
    } catch (const ModelIoError& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string b = bytes;
    const auto pos = b.find(from);
    b.replace(pos, from.size(), to);
    return b;
  };
  std::string magic = bytes;
  magic[0] = 'B';
  std::string version = bytes;
  version[4] = 7;
  // same-length header edits keep the preamble's length field valid
  const std::string shape = replace("\"hidden\":16", "\"hidden\":17");
  const std::string alphabet = replace("\"channel_map\":\"аб", "\"channel_map\":\"ба");

  const std::vector<std::pair<std::string, std::pair<std::string, ModelIoErrorKind>>> cases = {
      {"magic", {magic, ModelIoErrorKind::BadMagic}},
      {"version", {version, ModelIoErrorKind::UnsupportedVersion}},
      {"truncation", {bytes.substr(0, bytes.size() - 3), ModelIoErrorKind::TruncatedPayload}},
      {"shape", {shape, ModelIoErrorKind::ShapeMismatch}},
      {"alphabet", {alphabet, ModelIoErrorKind::AlphabetMismatch}},
  };
  std::string detail = exact ? "round trip bitwise exact" : "round trip differs";
  bool ok = exact;
  for (const auto& [name, c] : cases) {
    const auto kind = kind_of(c.first);
    const bool hit = kind == c.second;
    ok = ok && hit;
    detail += "; " + name + " -> " + (kind ? std::string(to_string(*kind)) : "accepted");
  }
  return {ok, detail};
}

Outcome decode_contract() {
  SplitMix64 rng(909);
  std::size_t not_vowel = 0, not_invariant = 0;
  std::vector<float> scores, scaled;
  for (int i = 0; i < 100000; ++i) {
    const auto word = synthetic::random_word(rng, 1 + rng.below(8));
    scores.resize(word.size());
    for (auto& v : scores) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
    const auto pos = decode_position(std::span<const float>(scores), word, DecodeMode::Constrained);
    not_vowel += !Alphabet::is_vowel(word[pos]);
    const auto factor = static_cast<float>(0.25 + rng.uniform() * 8.0);
    scaled = scores;
    for (auto& v : scaled) v *= factor;
    not_invariant += decode_position(std::span<const float>(scaled), word, DecodeMode::Constrained) != pos;
  }
  return {not_vowel == 0 && not_invariant == 0,
          fmt("100000 vectors: %zu non-vowel picks, %zu changed under positive scaling", not_vowel,
              not_invariant)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient exactness", gradient_exactness},
      {"memorization", memorization},
      {"synthetic stress language", synthetic_language},
      {"context advantage", context_advantage},
      {"context examples", context_examples},
      {"evaluation oracle", evaluation_oracle},
      {"split soundness", split_soundness},
      {"serialization", serialization},
      {"decode contract", decode_contract},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.contains(number)) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %d %s: %s\n", outcome.pass ? "PASS" : "FAIL", number, criteria[i].first,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
