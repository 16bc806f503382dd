#pragma once

// Full classifier: both LSTM directions, readout dropout, dense layer and
// softmax over the max_len positions.

#include <algorithm>
#include <cmath>
#include <span>

#include "accent/nn/lstm.hpp"
#include "accent/rng.hpp"

namespace accent::nn {

template <typename T>
struct ForwardCache {
  DirectionCache<T> fwd;
  DirectionCache<T> bwd;
  Vector<T> features;  // [h_fwd; h_bwd]
  Vector<T> mask;      // 0 or 1/(1-rate) per feature; ones at inference
  Vector<T> dropped;   // features * mask
  Vector<T> logits;
  Vector<T> probs;
};

/// Probability vector over max_len positions. In training mode dropout is
/// drawn from `rng` (required when dropout_rate > 0); inference applies no
/// mask and is seed-independent. `cache`, when given, receives everything
/// backward() needs.
template <typename T>
Vector<T> forward(const ModelParams<T>& params, std::span<const int> channels, bool training,
                  SplitMix64* rng = nullptr, ForwardCache<T>* cache = nullptr);

template <typename T>
Vector<T> forward(const ModelParams<T>& params, const InputMatrix& matrix, int length, bool training,
                  SplitMix64* rng = nullptr, ForwardCache<T>* cache = nullptr) {
  const auto channels = channel_sequence(matrix, length);
  return forward(params, std::span<const int>(channels), training, rng, cache);
}

inline constexpr double kProbabilityFloor = 1e-12;

/// Cross-entropy -log(max(p[target], 1e-12)).
template <typename T>
double loss(const Vector<T>& probs, std::size_t target) {
  const double p = std::max(static_cast<double>(probs[static_cast<Eigen::Index>(target)]), kProbabilityFloor);
  return -std::log(p);
}

/// Adds scale * d loss / d theta into `grads`.
template <typename T>
void accumulate_gradients(const ModelParams<T>& params, const ForwardCache<T>& cache,
                          std::size_t target, ParamSet<T>& grads, T scale = T(1));

template <typename T>
Gradients<T> backward(const ModelParams<T>& params, const ForwardCache<T>& cache,
                      std::size_t target) {
  Gradients<T> grads(params.weights.layout());
  accumulate_gradients(params, cache, target, grads);
  return grads;
}

extern template Vector<float> forward<float>(const ModelParams<float>&, std::span<const int>, bool,
                                             SplitMix64*, ForwardCache<float>*);
extern template Vector<double> forward<double>(const ModelParams<double>&, std::span<const int>,
                                               bool, SplitMix64*, ForwardCache<double>*);
extern template void accumulate_gradients<float>(const ModelParams<float>&,
                                                 const ForwardCache<float>&, std::size_t,
                                                 ParamSet<float>&, float);
extern template void accumulate_gradients<double>(const ModelParams<double>&,
                                                  const ForwardCache<double>&, std::size_t,
                                                  ParamSet<double>&, double);

}  // namespace accent::nn
