#include <cstring>
#include <limits>
#include <sstream>

#include "accent/modelio.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace accent;
using json = nlohmann::json;

namespace {

nn::ModelParams<float> sample_params(int channels = 34) {
  nn::Architecture arch;
  arch.hidden = 6;
  arch.encoding.max_len = 20;
  arch.encoding.channels = channels;
  auto p = nn::init_params<float>(arch, 9);
  auto flat = p.weights.flat();
  flat[0] = -0.0f;
  flat[1] = std::numeric_limits<float>::denorm_min();
  flat[2] = std::numeric_limits<float>::max();
  return p;
}

std::string saved_bytes(const nn::ModelParams<float>& p, ModelMetadata meta = {}) {
  std::ostringstream out;
  save_model(out, p, meta);
  return out.str();
}

ModelIoErrorKind load_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    load_model(in);
  } catch (const ModelIoError& e) {
    return e.kind();
  }
  FAIL("load succeeded");
  return ModelIoErrorKind::Io;
}

std::uint32_t header_length(const std::string& bytes) {
  std::uint32_t n = 0;
  for (int i = 3; i >= 0; --i) n = n << 8 | static_cast<unsigned char>(bytes[6 + i]);
  return n;
}

// Re-serialises the file with an edited JSON header.
std::string with_header(const std::string& bytes, const std::function<void(json&)>& edit) {
  const auto n = header_length(bytes);
  json header = json::parse(bytes.substr(10, n));
  edit(header);
  const std::string text = header.dump();
  std::string out = bytes.substr(0, 6);
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((text.size() >> shift) & 0xFF));
  return out + text + bytes.substr(10 + n);
}

}  // namespace

TEST_CASE("save then load is bitwise identical") {
  for (int channels : {33, 34}) {
    const auto p = sample_params(channels);
    const auto bytes = saved_bytes(p, {ModelTag::CDM, "abc123"});
    CHECK(bytes.substr(0, 4) == "ACCM");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    std::istringstream in(bytes);
    const auto loaded = load_model(in);
    CHECK(loaded.params.arch == p.arch);
    CHECK(loaded.meta.tag == ModelTag::CDM);
    CHECK(loaded.meta.manifest_digest == "abc123");
    REQUIRE(loaded.params.weights.flat().size() == p.weights.flat().size());
    CHECK(std::memcmp(loaded.params.weights.flat().data(), p.weights.flat().data(),
                      p.weights.flat().size_bytes()) == 0);
    CHECK(std::signbit(loaded.params.weights.flat()[0]));
    CHECK(saved_bytes(loaded.params, loaded.meta) == bytes);
  }
}

TEST_CASE("payload is little-endian float32 in block order") {
  const auto p = sample_params();
  const auto bytes = saved_bytes(p);
  const std::size_t start = 10 + header_length(bytes);
  CHECK(bytes.size() == start + 4 * p.weights.flat().size());
  const float value = p.weights.flat()[5];
  std::uint32_t raw = 0;
  for (int i = 3; i >= 0; --i) raw = raw << 8 | static_cast<unsigned char>(bytes[start + 20 + i]);
  CHECK(std::bit_cast<float>(raw) == value);
  const json header = json::parse(bytes.substr(10, header_length(bytes)));
  CHECK(header["blocks"][0]["name"] == "fwd.W");
  CHECK(header["blocks"][7]["name"] == "dense_b");
  CHECK(header["payload_bytes"] == 4 * p.weights.flat().size());
}

TEST_CASE("file round trip") {
  testing::TempDir dir("modelio");
  const auto path = dir.path() / "m.accm";
  const auto p = sample_params();
  save_model(path, p, {ModelTag::DictM, ""});
  const auto loaded = load_model(path);
  CHECK(loaded.meta.tag == ModelTag::DictM);
  CHECK(std::memcmp(loaded.params.weights.flat().data(), p.weights.flat().data(),
                    p.weights.flat().size_bytes()) == 0);
  CHECK_THROWS_AS(load_model(dir.path() / "missing.accm"), ModelIoError);
}

TEST_CASE("corrupted files are rejected with a specific error") {
  const auto bytes = saved_bytes(sample_params());

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(load_error(bad_magic) == ModelIoErrorKind::BadMagic);
  CHECK(load_error("") == ModelIoErrorKind::BadMagic);

  auto version = bytes;
  version[4] = static_cast<char>(999 & 0xFF);
  version[5] = static_cast<char>(999 >> 8);
  CHECK(load_error(version) == ModelIoErrorKind::UnsupportedVersion);

  CHECK(load_error(bytes.substr(0, bytes.size() - 1)) == ModelIoErrorKind::TruncatedPayload);
  CHECK(load_error(bytes.substr(0, 8)) == ModelIoErrorKind::TruncatedPayload);
  CHECK(load_error(bytes.substr(0, 40)) == ModelIoErrorKind::TruncatedPayload);

  CHECK(load_error(with_header(bytes, [](json& h) { h["hidden"] = 7; })) == ModelIoErrorKind::ShapeMismatch);
  CHECK(load_error(with_header(bytes, [](json& h) { h["blocks"][2]["rows"] = 5; })) ==
        ModelIoErrorKind::ShapeMismatch);
  CHECK(load_error(with_header(bytes, [](json& h) { h["payload_bytes"] = 8; })) ==
        ModelIoErrorKind::ShapeMismatch);
  CHECK(load_error(bytes + "x") == ModelIoErrorKind::ShapeMismatch);

  CHECK(load_error(with_header(bytes, [](json& h) {
          auto map = testing::u(h["channel_map"].get<std::string>());
          std::swap(map[0], map[1]);
          h["channel_map"] = testing::s(map);
        })) == ModelIoErrorKind::AlphabetMismatch);

  CHECK(load_error(with_header(bytes, [](json& h) { h.erase("hidden"); })) == ModelIoErrorKind::BadHeader);
  CHECK(load_error(with_header(bytes, [](json& h) { h["model_tag"] = "XYZ"; })) ==
        ModelIoErrorKind::BadHeader);
  auto garbage = bytes;
  garbage[10] = '!';
  CHECK(load_error(garbage) == ModelIoErrorKind::BadHeader);
}

TEST_CASE("mismatched parameters cannot be saved") {
  auto p = sample_params();
  p.arch.hidden = 7;
  std::ostringstream out;
  CHECK_THROWS_AS(save_model(out, p, {}), ModelIoError);
}
