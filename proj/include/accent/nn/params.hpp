#pragma once

// Parameter storage for the bidirectional LSTM classifier. All blocks live in
// one contiguous buffer in the order fwd.W, fwd.U, fwd.b, bwd.W, bwd.U, bwd.b,
// dense.W, dense.b; matrices are row-major. Optimizer updates, gradient
// reductions and serialization all operate on the flat buffer.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "accent/encoder.hpp"

namespace accent::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using VectorMap = Eigen::Map<Vector<T>>;
template <typename T>
using ConstVectorMap = Eigen::Map<const Vector<T>>;

struct Architecture {
  /// Units per direction; the dense layer sees 2 * hidden features.
  int hidden = 64;
  double dropout_rate = 0.2;
  EncodingConfig encoding;

  int gate_rows() const noexcept { return 4 * hidden; }
  void validate() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

enum class Block : int { FwdW, FwdU, FwdB, BwdW, BwdU, BwdB, DenseW, DenseB };

inline constexpr std::array<Block, 8> kAllBlocks = {Block::FwdW, Block::FwdU, Block::FwdB,
                                                    Block::BwdW, Block::BwdU, Block::BwdB,
                                                    Block::DenseW, Block::DenseB};

std::string_view block_name(Block block);
Block parse_block(std::string_view name);

struct BlockShape {
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(const Architecture& arch);

  const BlockShape& shape(Block block) const { return shapes_[static_cast<std::size_t>(block)]; }
  std::size_t total() const noexcept { return total_; }

  friend bool operator==(const ParamLayout& a, const ParamLayout& b) { return a.total_ == b.total_ && a.equal_shapes(b); }

 private:
  bool equal_shapes(const ParamLayout& other) const;

  std::array<BlockShape, kAllBlocks.size()> shapes_{};
  std::size_t total_ = 0;
};

enum class Direction { Forward, Backward };

// Gate rows are ordered [input, forget, candidate, output], hidden rows each.
template <typename T>
struct LstmDirectionParams {
  ConstMatrixMap<T> W;  // 4H x channels
  ConstMatrixMap<T> U;  // 4H x H
  ConstVectorMap<T> b;  // 4H
};

template <typename T>
struct LstmDirectionGrads {
  MatrixMap<T> W;
  MatrixMap<T> U;
  VectorMap<T> b;
};

template <typename T>
class ParamSet {
 public:
  ParamSet() = default;
  /// Zero-filled.
  explicit ParamSet(const ParamLayout& layout) : layout_(layout), data_(layout.total(), T(0)) {}

  const ParamLayout& layout() const noexcept { return layout_; }
  std::span<T> flat() noexcept { return data_; }
  std::span<const T> flat() const noexcept { return data_; }

  std::span<T> block(Block b) {
    const auto& s = layout_.shape(b);
    return {data_.data() + s.offset, s.size()};
  }
  std::span<const T> block(Block b) const {
    const auto& s = layout_.shape(b);
    return {data_.data() + s.offset, s.size()};
  }
  MatrixMap<T> matrix(Block b) {
    const auto& s = layout_.shape(b);
    return MatrixMap<T>(data_.data() + s.offset, s.rows, s.cols);
  }
  ConstMatrixMap<T> matrix(Block b) const {
    const auto& s = layout_.shape(b);
    return ConstMatrixMap<T>(data_.data() + s.offset, s.rows, s.cols);
  }
  VectorMap<T> vector(Block b) {
    const auto& s = layout_.shape(b);
    return VectorMap<T>(data_.data() + s.offset, static_cast<Eigen::Index>(s.size()));
  }
  ConstVectorMap<T> vector(Block b) const {
    const auto& s = layout_.shape(b);
    return ConstVectorMap<T>(data_.data() + s.offset, static_cast<Eigen::Index>(s.size()));
  }

  LstmDirectionParams<T> direction(Direction d) const {
    const bool fwd = d == Direction::Forward;
    return {matrix(fwd ? Block::FwdW : Block::BwdW), matrix(fwd ? Block::FwdU : Block::BwdU),
            vector(fwd ? Block::FwdB : Block::BwdB)};
  }
  LstmDirectionGrads<T> direction_grads(Direction d) {
    const bool fwd = d == Direction::Forward;
    return {matrix(fwd ? Block::FwdW : Block::BwdW), matrix(fwd ? Block::FwdU : Block::BwdU),
            vector(fwd ? Block::FwdB : Block::BwdB)};
  }

  void set_zero() { std::fill(data_.begin(), data_.end(), T(0)); }

  ParamSet& operator+=(const ParamSet& other) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  ParamSet& operator*=(T factor) {
    for (auto& v : data_) v *= factor;
    return *this;
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out(layout_);
    auto dst = out.flat();
    for (std::size_t i = 0; i < data_.size(); ++i) dst[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  ParamLayout layout_;
  // Fixed base alignment keeps Eigen's vectorized loops (and so the
  // rounding of every reduction) identical from run to run.
  std::vector<T, Eigen::aligned_allocator<T>> data_;
};

template <typename T>
using Gradients = ParamSet<T>;

template <typename T>
struct ModelParams {
  Architecture arch;
  ParamSet<T> weights;

  template <typename U>
  ModelParams<U> cast() const {
    return {arch, weights.template cast<U>()};
  }
};

/// Glorot-uniform weights, zero biases except the forget-gate slice (1.0).
/// Deterministic in `seed` across platforms.
template <typename T>
ModelParams<T> init_params(const Architecture& arch, std::uint64_t seed);

extern template ModelParams<float> init_params<float>(const Architecture&, std::uint64_t);
extern template ModelParams<double> init_params<double>(const Architecture&, std::uint64_t);

}  // namespace accent::nn
