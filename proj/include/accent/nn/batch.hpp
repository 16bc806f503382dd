#pragma once

// Mini-batch kernels. The OpenMP versions split work across instances; the
// *_serial versions are plain loops kept as the reference the parallel ones
// are tested and benchmarked against.

#include <cstdint>
#include <span>
#include <vector>

#include "accent/nn/model.hpp"

namespace accent::nn {

struct Example {
  std::span<const int> channels;
  std::size_t target = 0;
  /// Seeds this instance's dropout mask, so masks do not depend on which
  /// thread runs the instance.
  std::uint64_t dropout_seed = 0;
};

enum class Reduction {
  /// Fixed contiguous chunks summed by a fixed pairwise tree: bitwise
  /// identical for any thread count.
  FixedTree,
  /// One accumulator per thread with dynamic scheduling; faster, but the
  /// summation order follows the schedule.
  PerThread,
};

inline constexpr std::size_t kTreeLeaves = 16;

template <typename T>
class GradientWorkspace {
 public:
  explicit GradientWorkspace(const ParamLayout& layout) : layout_(layout) {}

  ParamSet<T>& partial(std::size_t i) {
    while (partials_.size() <= i) partials_.emplace_back(layout_);
    return partials_[i];
  }

 private:
  ParamLayout layout_;
  std::vector<ParamSet<T>> partials_;
};

/// Mean gradient over `batch` written to `grads`; returns the summed loss.
template <typename T>
double batch_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                       ParamSet<T>& grads, Reduction reduction, GradientWorkspace<T>& workspace);

template <typename T>
double batch_gradients_serial(const ModelParams<T>& params, std::span<const Example> batch,
                              ParamSet<T>& grads);

/// Inference probabilities, one row per input.
template <typename T>
RowMatrix<T> predict_batch(const ModelParams<T>& params, std::span<const std::vector<int>> inputs);

template <typename T>
RowMatrix<T> predict_batch_serial(const ModelParams<T>& params,
                                  std::span<const std::vector<int>> inputs);

extern template double batch_gradients<float>(const ModelParams<float>&, std::span<const Example>,
                                              ParamSet<float>&, Reduction,
                                              GradientWorkspace<float>&);
extern template double batch_gradients<double>(const ModelParams<double>&,
                                               std::span<const Example>, ParamSet<double>&,
                                               Reduction, GradientWorkspace<double>&);
extern template double batch_gradients_serial<float>(const ModelParams<float>&,
                                                     std::span<const Example>, ParamSet<float>&);
extern template double batch_gradients_serial<double>(const ModelParams<double>&,
                                                      std::span<const Example>, ParamSet<double>&);
extern template RowMatrix<float> predict_batch<float>(const ModelParams<float>&,
                                                      std::span<const std::vector<int>>);
extern template RowMatrix<double> predict_batch<double>(const ModelParams<double>&,
                                                        std::span<const std::vector<int>>);
extern template RowMatrix<float> predict_batch_serial<float>(const ModelParams<float>&,
                                                             std::span<const std::vector<int>>);
extern template RowMatrix<double> predict_batch_serial<double>(const ModelParams<double>&,
                                                               std::span<const std::vector<int>>);

}  // namespace accent::nn
