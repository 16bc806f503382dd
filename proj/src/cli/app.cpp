#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "accent/cli.hpp"
#include "accent/dataset.hpp"
#include "accent/eval.hpp"
#include "accent/modelio.hpp"
#include "accent/nn/gradcheck.hpp"
#include "accent/nn/lstm.hpp"
#include "accent/rng.hpp"
#include "accent/trainer.hpp"
#include "json.hpp"
#include "json_config.hpp"

namespace accent::cli {

using nlohmann::json;

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

/// Bad input or inconsistent flags; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kModes = {"dict", "cfm", "cdm"};
const std::vector<std::string> kDecodes = {"constrained", "raw"};
const std::vector<std::string> kOnOff = {"on", "off"};
const std::vector<std::string> kSplits = {"test", "all"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

template <typename T>
Parsed<T> parse_file(const std::string& path, const std::string& text,
                     Parsed<T> (*parser)(std::istream&, ParseOptions)) {
  std::istringstream in(text);
  try {
    return parser(in, ParseOptions{});
  } catch (const DatasetParseError& e) {
    throw UsageError(path + ":" + std::to_string(e.issue().line) + ": " + e.issue().message);
  }
}

std::vector<LexemeEntry> load_dictionary(const std::string& path) {
  return parse_file<LexemeEntry>(path, read_file(path), &parse_dictionary).items;
}

std::vector<CorpusUtterance> load_corpus(const std::string& path) {
  return parse_file<CorpusUtterance>(path, read_file(path), &parse_corpus).items;
}

std::string weights_digest(const nn::ModelParams<float>& params) {
  const auto flat = params.weights.flat();
  return fnv1a_hex(std::string_view(reinterpret_cast<const char*>(flat.data()), flat.size_bytes()));
}

bool on(const std::string& flag) { return flag == "on"; }

// Unset string flags are left out so a manifest replays as the same command.
json settings_json(json settings) {
  for (auto it = settings.begin(); it != settings.end();) {
    it = it->is_string() && it->get<std::string>().empty() ? settings.erase(it) : std::next(it);
  }
  return settings;
}

// ---------------------------------------------------------------------------
// train

struct TrainFlags {
  std::string mode = "cfm";
  std::string data, dict, corpus, out;
  int epochs = 10;
  int batch = 128;
  std::uint64_t seed = 1;
  int hidden = 64;
  double dropout = 0.2;
  double lr = 1e-3;
  int max_len = kDefaultMaxLen;
  int channels = Alphabet::kLetterCount + 1;
  double train_fraction = 2.0 / 3.0;
  double dev_fraction = 0.05;
  std::string decode = "constrained";
  bool reproducible = false;
  bool select_on_test = false;

  json to_json() const {
    return {{"mode", mode},
            {"data", data},
            {"dict", dict},
            {"corpus", corpus},
            {"out", out},
            {"epochs", epochs},
            {"batch", batch},
            {"seed", seed},
            {"hidden", hidden},
            {"dropout", dropout},
            {"lr", lr},
            {"max-len", max_len},
            {"channels", channels},
            {"train-fraction", train_fraction},
            {"dev-fraction", dev_fraction},
            {"decode", decode},
            {"reproducible", reproducible},
            {"select-on-test", select_on_test}};
  }
};

struct Splits {
  std::vector<TrainInstance> train, dev, test;
  InstanceStats stats;
  std::string dev_source = "dev";
};

template <typename T, typename Build>
Splits split_and_build(std::span<const T> items, const SplitConfig& split_cfg, Build build) {
  Split<T> outer;
  if constexpr (std::is_same_v<T, LexemeEntry>) {
    outer = split_dictionary(items, split_cfg);
  } else {
    outer = split_corpus(items, split_cfg);
  }
  const auto inner = carve_dev(std::span<const T>(outer.train), split_cfg);
  Splits s;
  auto add = [&](InstanceSet set, std::vector<TrainInstance>& into) {
    s.stats.candidates += set.stats.candidates;
    s.stats.duplicates_removed += set.stats.duplicates_removed;
    s.stats.too_long += set.stats.too_long;
    into = std::move(set.instances);
  };
  add(build(std::span<const T>(inner.train)), s.train);
  add(build(std::span<const T>(inner.test)), s.dev);
  add(build(std::span<const T>(outer.test)), s.test);
  return s;
}

int cmd_train(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  std::string path = f.data;
  Mode mode = parse_mode(f.mode);
  if (!f.dict.empty()) path = f.dict;
  if (!f.corpus.empty()) path = f.corpus;

  SplitConfig split_cfg;
  split_cfg.seed = f.seed;
  split_cfg.train_fraction = f.train_fraction;
  split_cfg.dev_fraction = f.dev_fraction;
  split_cfg.validate();
  const auto max_len = static_cast<std::size_t>(f.max_len);

  const std::string text = read_file(path);
  Splits s;
  if (mode == Mode::Dict) {
    const auto entries = parse_file<LexemeEntry>(path, text, &parse_dictionary).items;
    s = split_and_build(std::span<const LexemeEntry>(entries), split_cfg,
                        [&](std::span<const LexemeEntry> e) { return build_instances(e, max_len); });
  } else {
    const auto utterances = parse_file<CorpusUtterance>(path, text, &parse_corpus).items;
    s = split_and_build(std::span<const CorpusUtterance>(utterances), split_cfg,
                        [&](std::span<const CorpusUtterance> u) {
                          return build_instances(u, mode, max_len);
                        });
  }
  if (s.stats.too_long > 0) {
    err << "warning: " << s.stats.too_long << " instances longer than max_len " << f.max_len
        << " were dropped\n";
  }
  if (s.train.empty()) throw UsageError(path + ": no training instances after the split");
  const std::vector<TrainInstance>* dev = &s.dev;
  if (f.select_on_test) {
    dev = &s.test;
    s.dev_source = "test";
  }
  if (dev->empty()) {
    err << "warning: " << s.dev_source << " set is empty; selecting the epoch on the training set\n";
    dev = &s.train;
    s.dev_source = "train";
  }
  out << "instances: train " << s.train.size() << ", dev " << s.dev.size() << ", test "
      << s.test.size() << " (epoch selection on " << s.dev_source << ")\n";

  TrainRunConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch;
  cfg.seed = f.seed;
  cfg.adam.learning_rate = f.lr;
  cfg.reproducible = f.reproducible;
  cfg.model_tag = tag_for_mode(mode);
  cfg.arch.hidden = f.hidden;
  cfg.arch.dropout_rate = f.dropout;
  cfg.arch.encoding.max_len = f.max_len;
  cfg.arch.encoding.channels = f.channels;
  cfg.dev_decode = parse_decode_mode(f.decode);
  if (mode == Mode::Cdm && f.channels <= Alphabet::kSeparatorChannel) {
    throw UsageError("--mode cdm needs --channels 34 for the context separator");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const TrainResult result = train(s.train, *dev, cfg, [&](const EpochRecord& r) {
    char line[128];
    std::snprintf(line, sizeof line, "epoch %d  loss %.6f  dev %.4f  %.2fs\n", r.epoch,
                  r.mean_train_loss, r.dev_accuracy, r.seconds);
    out << line << std::flush;
  });

  const auto test_acc = s.test.empty()
                            ? std::optional<double>{}
                            : std::optional<double>{
                                  evaluate_accuracy(result.best, s.test, cfg.dev_decode).accuracy()};
  out << "best epoch " << result.best_epoch << ", test accuracy " << format_accuracy(test_acc)
      << '\n';

  json records = json::array();
  for (const auto& r : result.records) {
    records.push_back({{"epoch", r.epoch},
                       {"mean_train_loss", r.mean_train_loss},
                       {"dev_accuracy", r.dev_accuracy},
                       {"seconds", r.seconds}});
  }
  json manifest = {
      {"command", "train"},
      {"settings", settings_json(f.to_json())},
      {"data_digest", fnv1a_hex(text)},
      {"instances",
       {{"train", s.train.size()},
        {"dev", s.dev.size()},
        {"test", s.test.size()},
        {"too_long", s.stats.too_long},
        {"duplicates_removed", s.stats.duplicates_removed}}},
      {"dev_source", s.dev_source},
      {"model_tag", to_string(cfg.model_tag)},
      {"records", records},
      {"best_epoch", result.best_epoch},
      {"test_accuracy", test_acc ? json(*test_acc) : json(nullptr)},
      {"weights_digest", weights_digest(result.best)},
  };
  // The digest covers everything that determines the model; wall-clock
  // times and the output location are excluded.
  json digest_input = manifest;
  digest_input["settings"].erase("out");
  for (auto& r : digest_input["records"]) r.erase("seconds");
  const std::string digest = fnv1a_hex(digest_input.dump());
  manifest["digest"] = digest;

  save_model(f.out, result.best, ModelMetadata{cfg.model_tag, digest});
  write_file(f.out + ".manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << f.out << " (manifest digest " << digest << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalFlags {
  std::string model, data, mode, report;
  std::string split = "test";
  std::uint64_t seed = 1;
  double train_fraction = 2.0 / 3.0;
  std::string decode = "constrained";

  json to_json() const {
    return {{"model", model},   {"data", data},
            {"mode", mode},     {"report", report},
            {"split", split},   {"seed", seed},
            {"train-fraction", train_fraction}, {"decode", decode}};
  }
};

int cmd_eval(EvalFlags f, std::ostream& out, std::ostream& err) {
  const LoadedModel model = load_model(std::filesystem::path(f.model));
  const Mode mode = f.mode.empty() ? mode_for_tag(model.meta.tag) : parse_mode(f.mode);
  f.mode = to_string(mode);
  const auto max_len = static_cast<std::size_t>(model.params.arch.encoding.max_len);
  if (mode == Mode::Cdm && model.params.arch.encoding.channels <= Alphabet::kSeparatorChannel) {
    throw UsageError("--mode cdm needs a model with a separator channel");
  }

  SplitConfig split_cfg;
  split_cfg.seed = f.seed;
  split_cfg.train_fraction = f.train_fraction;
  split_cfg.validate();
  const bool all = f.split == "all";

  InstanceSet set;
  if (mode == Mode::Dict) {
    const auto entries = load_dictionary(f.data);
    const auto part = all ? entries : split_dictionary(entries, split_cfg).test;
    set = build_instances(part, max_len);
  } else {
    const auto utterances = load_corpus(f.data);
    const auto part = all ? utterances : split_corpus(utterances, split_cfg).test;
    set = build_instances(part, mode, max_len);
  }
  if (set.stats.too_long > 0) {
    err << "warning: " << set.stats.too_long << " instances longer than max_len " << max_len
        << " were skipped\n";
  }
  if (set.instances.empty()) err << "warning: no instances to evaluate\n";

  const auto scored = score_instances(model.params, set.instances, parse_decode_mode(f.decode));
  const auto report = bucket_accuracy(scored);
  const Tally all_tally = report.overall();
  out << "accuracy " << format_accuracy(report.micro_average) << " (" << all_tally.correct
      << " of " << all_tally.total << ")\n";
  if (f.report.empty()) {
    write_bucket_tsv(out, report);
  } else {
    std::ostringstream tsv;
    write_bucket_tsv(tsv, report);
    write_file(f.report, tsv.str());
    json j = json::parse(bucket_report_json(report));
    j["settings"] = settings_json(f.to_json());
    j["model_tag"] = to_string(model.meta.tag);
    j["manifest_digest"] = model.meta.manifest_digest;
    write_file(f.report + ".json", j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// homographs

struct HomographFlags {
  std::string dict, corpus, report;
  std::vector<std::string> models;
  std::size_t min_count = 50;
  std::size_t top_k = 50;
  std::string threshold_mode = "per-variant";
  std::string split = "test";
  std::uint64_t seed = 1;
  double train_fraction = 2.0 / 3.0;
  std::string decode = "constrained";

  json to_json() const {
    return {{"dict", dict},
            {"corpus", corpus},
            {"models", models},
            {"report", report},
            {"min-count", min_count},
            {"top-k", top_k},
            {"threshold-mode", threshold_mode},
            {"split", split},
            {"seed", seed},
            {"train-fraction", train_fraction},
            {"decode", decode}};
  }
};

int cmd_homographs(const HomographFlags& f, std::ostream& out, std::ostream& err) {
  const auto entries = load_dictionary(f.dict);
  const auto utterances = load_corpus(f.corpus);
  const auto candidates = extract_homographs(entries);
  const auto pairs = threshold_homographs(
      candidates, utterances, f.min_count, f.top_k,
      f.threshold_mode == "total" ? ThresholdMode::Total : ThresholdMode::PerVariant);

  SplitConfig split_cfg;
  split_cfg.seed = f.seed;
  split_cfg.train_fraction = f.train_fraction;
  split_cfg.validate();
  const auto scored_part = f.split == "all" ? utterances : split_corpus(utterances, split_cfg).test;

  std::set<std::u32string> surfaces;
  for (const auto& p : pairs) surfaces.insert(p.surface);
  if (pairs.empty()) {
    err << "warning: no homograph pair reaches min-count " << f.min_count << " ("
        << candidates.size() << " candidates in the dictionary)\n";
  }

  std::vector<LoadedModel> models;
  std::vector<std::vector<TrainInstance>> instances;
  std::vector<ModelUnderTest> under_test;
  std::map<std::string, int> seen_names;
  models.reserve(f.models.size());
  for (const auto& path : f.models) {
    models.push_back(load_model(std::filesystem::path(path)));
    const auto& m = models.back();
    Mode mode = mode_for_tag(m.meta.tag);
    if (mode == Mode::Dict) mode = Mode::Cfm;  // dictionary models see bare corpus words
    auto occ = corpus_occurrences(scored_part, mode,
                                  static_cast<std::size_t>(m.params.arch.encoding.max_len));
    std::erase_if(occ.instances, [&](const TrainInstance& t) {
      return !surfaces.contains(std::u32string(t.bare_word()));
    });
    instances.push_back(std::move(occ.instances));
    std::string name = std::filesystem::path(path).stem().string();
    if (const int n = seen_names[name]++; n > 0) name += "#" + std::to_string(n + 1);
    name += " (" + std::string(to_string(m.meta.tag)) + ")";
    under_test.push_back({name, nullptr, {}, parse_decode_mode(f.decode)});
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    under_test[i].params = &models[i].params;
    under_test[i].instances = instances[i];
  }
  const auto scores = score_homographs(pairs, under_test);

  for (const auto& s : scores) {
    const Tally t = s.buckets.overall();
    out << s.model << ": " << format_accuracy(t.accuracy()) << " (" << t.correct << " of "
        << t.total << ") over " << s.pairs.size() << " pairs\n";
  }
  std::ostringstream tsv;
  write_homograph_tsv(tsv, scores);
  if (f.report.empty()) {
    out << tsv.str();
  } else {
    write_file(f.report, tsv.str());
    json j = json::parse(homograph_report_json(pairs, scores));
    j["settings"] = settings_json(f.to_json());
    write_file(f.report + ".json", j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck

struct GradCheckFlags {
  int hidden = 8;
  int max_len = 12;
  int channels = Alphabet::kLetterCount + 1;
  std::uint64_t seed = 1;
  double tolerance = 1e-3;
  double epsilon = 1e-4;
  double dropout = 0.2;
  std::size_t instances = 20;
  std::size_t coords = 200;
  std::string corrupt_block;
};

int cmd_gradcheck(const GradCheckFlags& f, std::ostream& out, std::ostream& err) {
  nn::Architecture arch;
  arch.hidden = f.hidden;
  arch.dropout_rate = f.dropout;
  arch.encoding.max_len = f.max_len;
  arch.encoding.channels = f.channels;
  try {
    arch.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto params = nn::init_params<double>(arch, f.seed);

  SplitMix64 rng(derive_seed({f.seed, 0x73616D70}));
  std::vector<nn::GradCheckSample> samples(f.instances);
  for (auto& s : samples) {
    const auto length = static_cast<std::size_t>(1 + rng.below(static_cast<std::uint64_t>(f.max_len)));
    for (std::size_t i = 0; i < length; ++i) {
      s.channels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(f.channels))));
    }
    s.target = static_cast<std::size_t>(rng.below(length));
  }

  nn::GradCheckConfig cfg;
  cfg.tolerance = f.tolerance;
  cfg.epsilon = f.epsilon;
  cfg.coords_per_block = f.coords;
  cfg.seed = f.seed;
  if (f.dropout > 0) cfg.frozen_mask_seed = derive_seed({f.seed, 0x6D61736B});
  if (!f.corrupt_block.empty()) cfg.corrupt_block = nn::parse_block(f.corrupt_block);

  const auto start = std::chrono::steady_clock::now();
  const auto report = nn::check_gradients(params, samples, cfg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& b : report.blocks) {
    char line[128];
    std::snprintf(line, sizeof line, "%-8s checked %4zu  max_rel_error %.3e\n",
                  std::string(nn::block_name(b.block)).c_str(), b.checked, b.max_rel_error);
    out << line;
  }
  char tail[160];
  if (report.passed()) {
    std::snprintf(tail, sizeof tail, "PASS (tolerance %.1e, %zu instances, %.2fs)\n", f.tolerance,
                  samples.size(), seconds);
    out << tail;
    return kExitOk;
  }
  const auto& w = report.worst();
  std::snprintf(tail, sizeof tail,
                "FAIL: block %s coordinate %zu: analytic %.6e numeric %.6e (rel %.3e > %.1e)\n",
                std::string(nn::block_name(w.block)).c_str(), w.worst_index, w.analytic, w.numeric,
                w.max_rel_error, f.tolerance);
  out << tail;
  err << "gradient check failed in block " << nn::block_name(w.block) << '\n';
  return kExitCheck;
}

// ---------------------------------------------------------------------------
// accent

struct AccentFlags {
  std::string model, context, decode = "constrained";
  std::string yo_rule = "on";
  std::string monosyllable_shortcut = "on";
};

int cmd_accent(const AccentFlags& f, std::istream& in, std::ostream& out, std::ostream& err) {
  const LoadedModel model = load_model(std::filesystem::path(f.model));
  AccentOptions options;
  options.context = f.context.empty() ? model.meta.tag == ModelTag::CDM : on(f.context);
  options.yo_rule = on(f.yo_rule);
  options.monosyllable_shortcut = on(f.monosyllable_shortcut);
  options.decode = parse_decode_mode(f.decode);
  std::size_t line_no = 0;
  Annotator annotator(model.params, options, [&](const std::string& message) {
    err << "warning: line " << line_no << ": " << message << '\n';
  });

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      out << annotator.annotate_line(line);
    } catch (const TextError& e) {
      err << "warning: line " << line_no << ": " << e.what() << "; copied unchanged\n";
      out << line;
    }
    if (!in.eof()) out << '\n';
  }
  out.flush();
  return kExitOk;
}

// ---------------------------------------------------------------------------

template <typename T>
CLI::Option* choice(CLI::App* app, const std::string& name, T& target,
                    const std::vector<std::string>& allowed, const std::string& help) {
  return app->add_option(name, target, help)->check(CLI::IsMember(allowed))->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app("Character-level Russian word stress placement.", "accent");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of flag values for the subcommand; a run manifest works too");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.footer("Exit codes: 0 ok, 1 usage or input error, 2 numeric failure, 3 check failure.");

  TrainFlags tf;
  CLI::App* train_cmd = app.add_subcommand("train", "Split data, train a model and save it.");
  auto* mode_opt = choice(train_cmd, "--mode", tf.mode, kModes, "Instance mode");
  auto* data_opt = train_cmd->add_option("--data", tf.data, "Training data (format set by --mode)");
  auto* dict_opt = train_cmd->add_option("--dict", tf.dict, "Dictionary file (implies --mode dict)");
  auto* corpus_opt =
      train_cmd->add_option("--corpus", tf.corpus, "Corpus file (implies --mode cfm or cdm)");
  data_opt->excludes(dict_opt)->excludes(corpus_opt);
  dict_opt->excludes(corpus_opt);
  train_cmd->add_option("--out", tf.out, "Model output path")->required();
  train_cmd->add_option("--epochs", tf.epochs)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--batch", tf.batch)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--seed", tf.seed)->capture_default_str();
  train_cmd->add_option("--hidden", tf.hidden, "LSTM units per direction")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--dropout", tf.dropout)->check(CLI::Range(0.0, 0.99))->capture_default_str();
  train_cmd->add_option("--lr", tf.lr, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--max-len", tf.max_len)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--channels", tf.channels)->check(CLI::IsMember({33, 34}))->capture_default_str();
  train_cmd->add_option("--train-fraction", tf.train_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  train_cmd->add_option("--dev-fraction", tf.dev_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  choice(train_cmd, "--decode", tf.decode, kDecodes, "Decoding used for epoch selection");
  train_cmd->add_flag("--reproducible", tf.reproducible,
                      "Fixed-order gradient reduction: identical weights across thread counts");
  train_cmd->add_flag("--select-on-test", tf.select_on_test,
                      "Select the epoch on the test split instead of the dev share");

  EvalFlags ef;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Per-syllable accuracy of a model.");
  eval_cmd->add_option("--model", ef.model)->required();
  eval_cmd->add_option("--data", ef.data)->required();
  choice(eval_cmd, "--mode", ef.mode, kModes, "Instance mode (default: the model's)");
  eval_cmd->add_option("--report", ef.report, "TSV report path; JSON goes to <path>.json");
  choice(eval_cmd, "--split", ef.split, kSplits, "Evaluate the test split or every instance");
  eval_cmd->add_option("--seed", ef.seed, "Split seed used in training")->capture_default_str();
  eval_cmd->add_option("--train-fraction", ef.train_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  choice(eval_cmd, "--decode", ef.decode, kDecodes, "Decoding mode");

  HomographFlags hf;
  CLI::App* homo_cmd = app.add_subcommand("homographs", "Score models on frequent homographs.");
  homo_cmd->add_option("--dict", hf.dict)->required();
  homo_cmd->add_option("--corpus", hf.corpus)->required();
  homo_cmd->add_option("--models", hf.models, "One or more model files")->required();
  homo_cmd->add_option("--min-count", hf.min_count)->capture_default_str();
  homo_cmd->add_option("--top-k", hf.top_k)->check(CLI::PositiveNumber)->capture_default_str();
  choice(homo_cmd, "--threshold-mode", hf.threshold_mode, {"per-variant", "total"},
         "min-count applies to each variant or to the pair total");
  homo_cmd->add_option("--report", hf.report, "TSV report path; JSON goes to <path>.json");
  choice(homo_cmd, "--split", hf.split, kSplits, "Score the corpus test split or all of it");
  homo_cmd->add_option("--seed", hf.seed, "Split seed used in training")->capture_default_str();
  homo_cmd->add_option("--train-fraction", hf.train_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  choice(homo_cmd, "--decode", hf.decode, kDecodes, "Decoding mode");

  GradCheckFlags gf;
  CLI::App* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check.");
  grad_cmd->add_option("--hidden", gf.hidden)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--maxlen", gf.max_len)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--channels", gf.channels)->check(CLI::IsMember({33, 34}))->capture_default_str();
  grad_cmd->add_option("--seed", gf.seed)->capture_default_str();
  grad_cmd->add_option("--tolerance", gf.tolerance)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--epsilon", gf.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--dropout", gf.dropout)->check(CLI::Range(0.0, 0.99))->capture_default_str();
  grad_cmd->add_option("--instances", gf.instances)->check(CLI::PositiveNumber)->capture_default_str();
  grad_cmd->add_option("--coords", gf.coords, "Coordinates sampled per block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  std::vector<std::string> block_names;
  for (nn::Block b : nn::kAllBlocks) block_names.emplace_back(nn::block_name(b));
  grad_cmd->add_option("--corrupt-block", gf.corrupt_block, "Test hook: perturb one block's gradient")
      ->check(CLI::IsMember(block_names));

  AccentFlags af;
  CLI::App* accent_cmd = app.add_subcommand("accent", "Mark stress in text read from stdin.");
  accent_cmd->add_option("--model", af.model)->required();
  choice(accent_cmd, "--context", af.context, kOnOff, "Left context (default: on for CDM models)");
  choice(accent_cmd, "--yo-rule", af.yo_rule, kOnOff, "Stress a single ё without the model");
  choice(accent_cmd, "--monosyllable-shortcut", af.monosyllable_shortcut, kOnOff,
         "Stress one-vowel words without the model");
  choice(accent_cmd, "--decode", af.decode, kDecodes, "Decoding mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      const bool mode_given = mode_opt->count() > 0;
      if (tf.data.empty() && tf.dict.empty() && tf.corpus.empty()) {
        throw UsageError("train needs one of --data, --dict or --corpus");
      }
      if (!tf.dict.empty()) {
        if (mode_given && tf.mode != "dict") {
          throw UsageError("--mode " + tf.mode + " conflicts with --dict (use --corpus)");
        }
        tf.mode = "dict";
      }
      if (!tf.corpus.empty() && tf.mode == "dict") {
        if (mode_given) throw UsageError("--mode dict conflicts with --corpus (use --dict)");
        tf.mode = "cfm";
      }
      return cmd_train(tf, out, err);
    }
    if (eval_cmd->parsed()) return cmd_eval(ef, out, err);
    if (homo_cmd->parsed()) return cmd_homographs(hf, out, err);
    if (grad_cmd->parsed()) return cmd_gradcheck(gf, out, err);
    if (accent_cmd->parsed()) return cmd_accent(af, in, out, err);
  } catch (const TrainingAborted& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const nn::NonFiniteActivation& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace accent::cli
