#include "accent/modelio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "json.hpp"

namespace accent {

using nlohmann::json;

std::string_view to_string(ModelIoErrorKind kind) {
  switch (kind) {
    case ModelIoErrorKind::Io: return "Io";
    case ModelIoErrorKind::BadMagic: return "BadMagic";
    case ModelIoErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ModelIoErrorKind::TruncatedPayload: return "TruncatedPayload";
    case ModelIoErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ModelIoErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ModelIoErrorKind::BadHeader: return "BadHeader";
  }
  return "?";
}

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

json make_header(const nn::ModelParams<float>& params, const ModelMetadata& meta) {
  const auto& arch = params.arch;
  json blocks = json::array();
  for (nn::Block b : nn::kAllBlocks) {
    const auto& shape = params.weights.layout().shape(b);
    blocks.push_back({{"name", nn::block_name(b)}, {"rows", shape.rows}, {"cols", shape.cols}});
  }
  return json{
      {"model_tag", to_string(meta.tag)},
      {"hidden", arch.hidden},
      {"dropout_rate", arch.dropout_rate},
      {"max_len", arch.encoding.max_len},
      {"channels", arch.encoding.channels},
      {"channel_map", to_utf8(Alphabet::channel_map(arch.encoding.channels))},
      {"manifest_digest", meta.manifest_digest},
      {"blocks", std::move(blocks)},
      {"payload_bytes", params.weights.layout().total() * sizeof(float)},
  };
}

// Reads exactly n bytes or reports how many were available.
std::size_t read_some(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace

void save_model(std::ostream& out, const nn::ModelParams<float>& params, const ModelMetadata& meta) {
  if (params.weights.layout() != nn::ParamLayout(params.arch)) {
    throw ModelIoError(ModelIoErrorKind::ShapeMismatch, "parameters do not match architecture");
  }
  const std::string header = make_header(params, meta).dump();
  std::string bytes(kModelMagic, sizeof kModelMagic);
  put_u16(bytes, kModelFormatVersion);
  put_u32(bytes, static_cast<std::uint32_t>(header.size()));
  bytes += header;
  const auto flat = params.weights.flat();
  bytes.reserve(bytes.size() + flat.size() * 4);
  for (float v : flat) put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelIoError(ModelIoErrorKind::Io, "write failed");
}

void save_model(const std::filesystem::path& path, const nn::ModelParams<float>& params,
                const ModelMetadata& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelIoError(ModelIoErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  save_model(out, params, meta);
}

LoadedModel load_model(std::istream& in) {
  unsigned char prefix[10];
  const std::size_t got = read_some(in, reinterpret_cast<char*>(prefix), sizeof prefix);
  if (got < 4 || std::memcmp(prefix, kModelMagic, 4) != 0) {
    throw ModelIoError(ModelIoErrorKind::BadMagic, "not a model file (expected magic \"ACCM\")");
  }
  if (got < sizeof prefix) throw ModelIoError(ModelIoErrorKind::TruncatedPayload, "file ends inside the preamble");
  const std::uint16_t version = static_cast<std::uint16_t>(prefix[4] | prefix[5] << 8);
  if (version != kModelFormatVersion) {
    throw ModelIoError(ModelIoErrorKind::UnsupportedVersion,
                       "format version " + std::to_string(version) + " (supported: " +
                           std::to_string(kModelFormatVersion) + ")");
  }
  const std::uint32_t header_len = get_u32(prefix + 6);
  std::string header_text(header_len, '\0');
  if (read_some(in, header_text.data(), header_len) < header_len) {
    throw ModelIoError(ModelIoErrorKind::TruncatedPayload, "file ends inside the header");
  }

  LoadedModel model;
  std::size_t payload_bytes = 0;
  try {
    const json header = json::parse(header_text);
    auto& arch = model.params.arch;
    arch.hidden = header.at("hidden").get<int>();
    arch.dropout_rate = header.at("dropout_rate").get<double>();
    arch.encoding.max_len = header.at("max_len").get<int>();
    arch.encoding.channels = header.at("channels").get<int>();
    model.meta.tag = parse_model_tag(header.at("model_tag").get<std::string>());
    model.meta.manifest_digest = header.at("manifest_digest").get<std::string>();
    payload_bytes = header.at("payload_bytes").get<std::size_t>();

    const std::string map = header.at("channel_map").get<std::string>();
    if (arch.encoding.channels != Alphabet::kLetterCount &&
        arch.encoding.channels != Alphabet::kLetterCount + 1) {
      throw ModelIoError(ModelIoErrorKind::ShapeMismatch,
                         "unsupported channel count " + std::to_string(arch.encoding.channels));
    }
    if (map != to_utf8(Alphabet::channel_map(arch.encoding.channels))) {
      throw ModelIoError(ModelIoErrorKind::AlphabetMismatch,
                         "channel map '" + map + "' differs from this build's alphabet");
    }
    try {
      arch.validate();
    } catch (const std::invalid_argument& e) {
      throw ModelIoError(ModelIoErrorKind::ShapeMismatch, e.what());
    }
    const nn::ParamLayout layout(arch);
    const auto& blocks = header.at("blocks");
    if (blocks.size() != nn::kAllBlocks.size()) {
      throw ModelIoError(ModelIoErrorKind::ShapeMismatch, "header lists a wrong number of blocks");
    }
    for (std::size_t i = 0; i < nn::kAllBlocks.size(); ++i) {
      const auto& shape = layout.shape(nn::kAllBlocks[i]);
      const auto& b = blocks[i];
      if (b.at("name").get<std::string>() != nn::block_name(nn::kAllBlocks[i]) ||
          b.at("rows").get<int>() != shape.rows || b.at("cols").get<int>() != shape.cols) {
        throw ModelIoError(ModelIoErrorKind::ShapeMismatch,
                           "block " + std::string(nn::block_name(nn::kAllBlocks[i])) +
                               " does not match the declared architecture");
      }
    }
    if (payload_bytes != layout.total() * sizeof(float)) {
      throw ModelIoError(ModelIoErrorKind::ShapeMismatch,
                         "payload_bytes " + std::to_string(payload_bytes) + " but shapes need " +
                             std::to_string(layout.total() * sizeof(float)));
    }
    model.params.weights = nn::ParamSet<float>(layout);
  } catch (const json::exception& e) {
    throw ModelIoError(ModelIoErrorKind::BadHeader, e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelIoError(ModelIoErrorKind::BadHeader, e.what());
  }

  std::vector<unsigned char> payload(payload_bytes);
  if (read_some(in, reinterpret_cast<char*>(payload.data()), payload_bytes) < payload_bytes) {
    throw ModelIoError(ModelIoErrorKind::TruncatedPayload,
                       "payload shorter than the declared " + std::to_string(payload_bytes) +
                           " bytes");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ModelIoError(ModelIoErrorKind::ShapeMismatch, "trailing bytes after the payload");
  }
  auto flat = model.params.weights.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i] = std::bit_cast<float>(get_u32(payload.data() + 4 * i));
  }
  return model;
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError(ModelIoErrorKind::Io, "cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace accent
