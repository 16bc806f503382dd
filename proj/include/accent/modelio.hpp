#pragma once

// Model file layout (all integers little-endian):
//
//   offset 0   "ACCM"                 magic
//   offset 4   u16                    format version (kModelFormatVersion)
//   offset 6   u32                    header length N in bytes
//   offset 10  N bytes                UTF-8 JSON header
//   offset 10+N                       payload: IEEE-754 binary32 values
//
// The payload holds the parameter blocks back to back in the order fwd.W,
// fwd.U, fwd.b, bwd.W, bwd.U, bwd.b, dense_W, dense_b, each matrix row-major.
// The header records the architecture, the channel map, the model tag, the
// training manifest digest, every block's shape and the payload size.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "accent/nn/params.hpp"
#include "accent/trainer.hpp"

namespace accent {

inline constexpr char kModelMagic[4] = {'A', 'C', 'C', 'M'};
inline constexpr std::uint16_t kModelFormatVersion = 1;

enum class ModelIoErrorKind {
  Io,
  BadMagic,
  UnsupportedVersion,
  TruncatedPayload,
  ShapeMismatch,
  AlphabetMismatch,
  BadHeader,
};

std::string_view to_string(ModelIoErrorKind kind);

class ModelIoError : public std::runtime_error {
 public:
  ModelIoError(ModelIoErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  ModelIoErrorKind kind() const noexcept { return kind_; }

 private:
  ModelIoErrorKind kind_;
};

struct ModelMetadata {
  ModelTag tag = ModelTag::CFM;
  /// Digest of the training manifest this model came from; empty if unknown.
  std::string manifest_digest;
};

struct LoadedModel {
  nn::ModelParams<float> params;
  ModelMetadata meta;
};

void save_model(std::ostream& out, const nn::ModelParams<float>& params, const ModelMetadata& meta);
void save_model(const std::filesystem::path& path, const nn::ModelParams<float>& params,
                const ModelMetadata& meta);

LoadedModel load_model(std::istream& in);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace accent
