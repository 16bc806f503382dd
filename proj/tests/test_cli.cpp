#include <fstream>
#include <sstream>

#include "accent/cli.hpp"
#include "accent/modelio.hpp"
#include "accent/nn/model.hpp"
#include "accent/synthetic.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace accent;
using json = nlohmann::json;
using testing::s;
using testing::u;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "accent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string dictionary_text(const std::vector<StressedWord>& words) {
  std::string text;
  for (const auto& w : words) text += s(w.chars()) + "\t" + s(format_stress_mark(w)) + "\n";
  return text;
}

std::string corpus_text(const std::vector<CorpusUtterance>& utterances) {
  std::string text;
  for (const auto& utt : utterances) {
    for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
      text += (i ? " " : "") + s(format_stress_mark(utt.tokens[i]));
    }
    text += "\n";
  }
  return text;
}

std::string dictionary_text(const std::vector<LexemeEntry>& entries) {
  std::string text;
  for (const auto& e : entries) {
    text += s(e.lemma) + "\t";
    for (std::size_t i = 0; i < e.forms.size(); ++i) text += (i ? " " : "") + s(format_stress_mark(e.forms[i]));
    text += "\n";
  }
  return text;
}

nn::ModelParams<float> zero_model(int max_len = 40, int hidden = 4) {
  nn::Architecture arch;
  arch.hidden = hidden;
  arch.encoding.max_len = max_len;
  return {arch, nn::ParamSet<float>(nn::ParamLayout(arch))};
}

std::string without_marks(const std::string& text) {
  std::u32string out;
  for (char32_t c : u(text)) {
    if (c != kStressMark) out.push_back(c);
  }
  return s(out);
}

}  // namespace

TEST_CASE("usage errors and help") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"gradcheck", "--bogus"}).code == cli::kExitUsage);
  CHECK(run_cli({"gradcheck", "--hidden", "0"}).code == cli::kExitUsage);
  CHECK(run_cli({"gradcheck", "--hidden", "2", "--hidden", "3"}).code == cli::kExitUsage);
  const auto help = run_cli({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("Exit codes") != std::string::npos);
  CHECK(run_cli({"train", "--help"}).code == cli::kExitOk);
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("train rejects bad input") {
  testing::TempDir dir("cli-train");
  const auto dict = dir.file("d.txt");
  spit(dict, "дом\tдо́м\nкот\tkot\n");
  const auto model = dir.file("m.accm");
  auto r = run_cli({"train", "--dict", dict, "--out", model});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find(dict + ":2:") != std::string::npos);

  r = run_cli({"train", "--dict", dict, "--mode", "cfm", "--out", model});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("conflicts") != std::string::npos);
  CHECK(run_cli({"train", "--dict", dict, "--corpus", dict, "--out", model}).code == cli::kExitUsage);
  CHECK(run_cli({"train", "--dict", dir.file("missing.txt"), "--out", model}).code == cli::kExitUsage);
  CHECK(run_cli({"train", "--data", dict, "--mode", "cdm", "--channels", "33", "--out", model}).code ==
        cli::kExitUsage);
  CHECK(run_cli({"train", "--dict", dict}).code == cli::kExitUsage);
}

TEST_CASE("diverging training exits with the numeric code") {
  testing::TempDir dir("cli-diverge");
  const auto dict = dir.file("d.txt");
  spit(dict, "дом\tдо́м\nмолоко\tмолоко́\nгорода\tгорода́\nрука\tрука́\nкоза\tко́за\n");
  const auto r = run_cli({"train", "--dict", dict, "--out", dir.file("m.accm"), "--lr", "1e38", "--epochs", "5",
                          "--batch", "1", "--hidden", "4"});
  CHECK(r.code == cli::kExitNumeric);
  CHECK(r.err.find("non-finite") != std::string::npos);
}

TEST_CASE("train, replay from the manifest, and evaluate") {
  testing::TempDir dir("cli-replay");
  const auto dict = dir.file("d.txt");
  spit(dict, dictionary_text(synthetic::random_stressed_words(120, 1, 3, 3)));
  const auto model = dir.file("m.accm");
  auto r = run_cli({"train", "--dict", dict, "--out", model, "--epochs", "2", "--hidden", "8", "--max-len",
                    "16", "--reproducible", "--seed", "4"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("epoch 2") != std::string::npos);
  const json manifest = json::parse(slurp(model + ".manifest.json"));
  CHECK(manifest["model_tag"] == "DictM");
  CHECK(manifest["records"].size() == 2);
  CHECK(manifest["settings"]["hidden"] == 8);
  const auto loaded = load_model(std::filesystem::path(model));
  CHECK(loaded.meta.manifest_digest == manifest["digest"]);

  const auto replayed = dir.file("replay.accm");
  r = run_cli({"--config", model + ".manifest.json", "train", "--out", replayed});
  REQUIRE(r.code == cli::kExitOk);
  const json again = json::parse(slurp(replayed + ".manifest.json"));
  CHECK(again["digest"] == manifest["digest"]);
  CHECK(again["weights_digest"] == manifest["weights_digest"]);

  const auto config = dir.file("c.json");
  spit(config, R"({"hidden": 8, "bogus": 1})");
  CHECK(run_cli({"--config", config, "train", "--dict", dict, "--out", replayed}).code == cli::kExitUsage);

  const auto report = dir.file("r.tsv");
  r = run_cli({"eval", "--model", model, "--data", dict, "--report", report});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("accuracy ", 0) == 0);
  CHECK(slurp(report).rfind("syllables\taccuracy\tcorrect\n", 0) == 0);
  const json rj = json::parse(slurp(report + ".json"));
  CHECK(rj["model_tag"] == "DictM");
  CHECK(rj["settings"]["split"] == "test");
}

TEST_CASE("eval with hand-built models") {
  testing::TempDir dir("cli-eval");
  const auto dict = dir.file("d.txt");
  spit(dict, "дом\tдо́м\nкот\tко́т\nмолоко\tмолоко́\n");
  const auto model = dir.file("zero.accm");
  save_model(std::filesystem::path(model), zero_model(), {ModelTag::DictM, ""});

  auto r = run_cli({"eval", "--model", model, "--data", dict, "--split", "all", "--decode", "raw"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("accuracy 0.0000 (0 of 3)", 0) == 0);

  // with every input starting on its stressed vowel, raw decoding is perfect
  spit(dict, "ать\tа́ть\nоко\tо́ко\nибо\tи́бо\n");
  r = run_cli({"eval", "--model", model, "--data", dict, "--split", "all", "--decode", "raw"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("micro-average\t1.0000\t3 of 3") != std::string::npos);
  CHECK(run_cli({"eval", "--model", dir.file("nope.accm"), "--data", dict}).code == cli::kExitUsage);
}

TEST_CASE("homographs") {
  testing::TempDir dir("cli-homographs");
  synthetic::ContextHomographSpec spec;
  spec.surfaces = 4;
  spec.suffixes_per_variant = 3;
  spec.occurrences = 10;
  spec.seed = 2;
  const auto data = synthetic::context_homographs(spec);
  const auto dict = dir.file("d.txt");
  const auto corpus = dir.file("c.txt");
  spit(dict, dictionary_text(data.dictionary));
  spit(corpus, corpus_text(data.train));

  const auto constant = dir.file("const.accm");
  save_model(std::filesystem::path(constant), zero_model(), {ModelTag::CFM, ""});

  auto r = run_cli({"homographs", "--dict", dict, "--corpus", corpus, "--models", constant});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.err.find("no homograph pair") != std::string::npos);

  r = run_cli({"homographs", "--dict", dict, "--corpus", corpus, "--models", constant, "--min-count", "5",
               "--top-k", "1", "--split", "all"});
  REQUIRE(r.code == cli::kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].find("const (CFM): 0.5000") == 0);
  CHECK(rows[1] == "model\twordform\trow\taccuracy\tcorrect");
  CHECK(rows[2].find("\tvariant\t") != std::string::npos);
  CHECK(rows[4].find("\tpair\t0.5000\t10 of 20") != std::string::npos);

  const auto cdm = dir.file("cdm.accm");
  r = run_cli({"train", "--corpus", corpus, "--mode", "cdm", "--out", cdm, "--epochs", "40", "--hidden", "16",
               "--dropout", "0", "--lr", "0.01", "--batch", "16", "--train-fraction", "0.9", "--dev-fraction",
               "0.05", "--reproducible"});
  REQUIRE(r.code == cli::kExitOk);
  const auto report = dir.file("h.tsv");
  r = run_cli({"homographs", "--dict", dict, "--corpus", corpus, "--models", cdm, "--models", constant,
               "--min-count", "5", "--split", "all", "--report", report});
  REQUIRE(r.code == cli::kExitOk);
  const auto first = r.out.find("cdm (CDM): ");
  const auto second = r.out.find("const (CFM): ");
  REQUIRE(first != std::string::npos);
  REQUIRE(second != std::string::npos);
  const double cdm_acc = std::stod(r.out.substr(first + 11));
  const double const_acc = std::stod(r.out.substr(second + 13));
  CHECK(const_acc <= 0.5);
  CHECK(cdm_acc > const_acc);
  const json rj = json::parse(slurp(report + ".json"));
  CHECK(rj["settings"]["min-count"] == 5);
}

TEST_CASE("gradcheck") {
  auto r = run_cli({"gradcheck", "--instances", "5", "--coords", "20"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("dense_W") != std::string::npos);

  r = run_cli({"gradcheck", "--instances", "5", "--coords", "20", "--tolerance", "1e-12"});
  CHECK(r.code == cli::kExitCheck);
  CHECK(r.out.find("FAIL") != std::string::npos);

  r = run_cli({"gradcheck", "--instances", "5", "--coords", "20", "--corrupt-block", "bwd.U"});
  CHECK(r.code == cli::kExitCheck);
  CHECK(r.err.find("bwd.U") != std::string::npos);
  CHECK(run_cli({"gradcheck", "--corrupt-block", "nope"}).code == cli::kExitUsage);
}

TEST_CASE("accent command") {
  testing::TempDir dir("cli-accent");
  const auto model = dir.file("m.accm");
  nn::Architecture arch;
  arch.hidden = 8;
  arch.encoding.max_len = 12;
  save_model(std::filesystem::path(model), nn::init_params<float>(arch, 3), {ModelTag::CDM, ""});

  const std::string text = "Те облака плыли, дом ёж\nа уже до́ма hello 42\nпереосвидетельствование\n\nкот";
  const auto r = run_cli({"accent", "--model", model}, text);
  REQUIRE(r.code == cli::kExitOk);
  CHECK(without_marks(r.out) == without_marks(text));
  CHECK(r.out.find("до́м ёж\n") != std::string::npos);
  CHECK(r.out.find("до́ма hello 42") != std::string::npos);
  CHECK(r.out.find("ко́т") != std::string::npos);
  CHECK(r.out.back() != '\n');
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(r.err.find("max_len") != std::string::npos);

  const auto with_newline = run_cli({"accent", "--model", model, "--context", "off"}, "кот\n");
  CHECK(with_newline.out == "ко́т\n");
  CHECK(run_cli({"accent", "--model", model, "--context", "maybe"}, "").code == cli::kExitUsage);
}

TEST_CASE("annotator rules") {
  const auto params = zero_model(12);
  cli::Annotator plain(params, {});
  CHECK(plain.annotate_line("дом") == "до́м");
  CHECK(plain.annotate_line("ёлка") == "ёлка");
  CHECK(plain.annotate_line("Молоко") == "Мо́локо");
  CHECK(plain.annotate_line("тсс, 123") == "тсс, 123");
  CHECK(plain.model_calls() == 1);

  cli::AccentOptions no_rules;
  no_rules.yo_rule = false;
  no_rules.monosyllable_shortcut = false;
  no_rules.decode = DecodeMode::Raw;
  cli::Annotator raw(params, no_rules);
  CHECK(raw.annotate_line("дом") == "д́ом");
  CHECK(raw.model_calls() == 1);

  const auto no_sep = [] {
    nn::Architecture a;
    a.hidden = 2;
    a.encoding.channels = 33;
    return nn::ModelParams<float>{a, nn::ParamSet<float>(nn::ParamLayout(a))};
  }();
  cli::AccentOptions ctx;
  ctx.context = true;
  CHECK_THROWS_AS(cli::Annotator(no_sep, ctx), std::invalid_argument);
}

TEST_CASE("context predictions match a direct decode") {
  nn::Architecture arch;
  arch.hidden = 8;
  arch.encoding.max_len = 20;
  const auto params = nn::init_params<float>(arch, 21);
  cli::AccentOptions ctx;
  ctx.context = true;
  std::vector<std::string> warnings;
  cli::Annotator annotator(params, ctx, [&](const std::string& w) { warnings.push_back(w); });

  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto prev = synthetic::random_word(rng, 1 + rng.below(3));
    const auto word = synthetic::random_word(rng, 2 + rng.below(3));
    std::u32string input = std::u32string(context_prefix(prev)) + kSeparator;
    const std::size_t offset = input.size();
    input += word;
    const auto got = annotator.stress_for(word, std::u32string_view(prev));
    if (input.size() > 20) {
      CHECK_FALSE(got.has_value());
      continue;
    }
    const auto channels = channel_sequence(input, arch.encoding);
    const auto probs = nn::forward(params, std::span<const int>(channels), false);
    const auto expected = decode_position(std::span<const float>(probs.data() + offset, word.size()), word,
                                          DecodeMode::Constrained);
    REQUIRE(got == std::optional<std::size_t>(expected));
  }
  CHECK(annotator.stress_for(U"", std::nullopt) == std::nullopt);
}
