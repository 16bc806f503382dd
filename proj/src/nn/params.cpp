#include "accent/nn/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "accent/rng.hpp"

namespace accent::nn {

void Architecture::validate() const {
  if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("dropout_rate must lie in [0, 1)");
  }
  encoding.validate();
}

std::string_view block_name(Block block) {
  switch (block) {
    case Block::FwdW: return "fwd.W";
    case Block::FwdU: return "fwd.U";
    case Block::FwdB: return "fwd.b";
    case Block::BwdW: return "bwd.W";
    case Block::BwdU: return "bwd.U";
    case Block::BwdB: return "bwd.b";
    case Block::DenseW: return "dense_W";
    case Block::DenseB: return "dense_b";
  }
  return "?";
}

Block parse_block(std::string_view name) {
  for (Block b : kAllBlocks) {
    if (block_name(b) == name) return b;
  }
  throw std::invalid_argument("unknown parameter block '" + std::string(name) + "'");
}

ParamLayout::ParamLayout(const Architecture& arch) {
  arch.validate();
  const int gates = arch.gate_rows();
  const int h = arch.hidden;
  const int c = arch.encoding.channels;
  const int out = arch.encoding.max_len;
  const std::array<std::pair<int, int>, kAllBlocks.size()> dims = {{
      {gates, c}, {gates, h}, {gates, 1},
      {gates, c}, {gates, h}, {gates, 1},
      {out, 2 * h}, {out, 1},
  }};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    shapes_[i] = BlockShape{dims[i].first, dims[i].second, offset};
    offset += shapes_[i].size();
  }
  total_ = offset;
}

bool ParamLayout::equal_shapes(const ParamLayout& other) const {
  for (std::size_t i = 0; i < shapes_.size(); ++i) {
    if (shapes_[i].rows != other.shapes_[i].rows || shapes_[i].cols != other.shapes_[i].cols) {
      return false;
    }
  }
  return true;
}

template <typename T>
ModelParams<T> init_params(const Architecture& arch, std::uint64_t seed) {
  ModelParams<T> params{arch, ParamSet<T>(ParamLayout(arch))};
  SplitMix64 rng(seed);
  auto fill_glorot = [&](Block block, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : params.weights.block(block)) {
      v = static_cast<T>(-limit + 2.0 * limit * rng.uniform());
    }
  };
  const int gates = arch.gate_rows();
  for (Direction d : {Direction::Forward, Direction::Backward}) {
    const bool fwd = d == Direction::Forward;
    fill_glorot(fwd ? Block::FwdW : Block::BwdW, arch.encoding.channels, gates);
    fill_glorot(fwd ? Block::FwdU : Block::BwdU, arch.hidden, gates);
    auto bias = params.weights.vector(fwd ? Block::FwdB : Block::BwdB);
    bias.setZero();
    bias.segment(arch.hidden, arch.hidden).setConstant(T(1));
  }
  fill_glorot(Block::DenseW, 2 * arch.hidden, arch.encoding.max_len);
  params.weights.vector(Block::DenseB).setZero();
  return params;
}

template ModelParams<float> init_params<float>(const Architecture&, std::uint64_t);
template ModelParams<double> init_params<double>(const Architecture&, std::uint64_t);

}  // namespace accent::nn
