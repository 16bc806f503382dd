#pragma once

#include <cstdint>
#include <span>

#include "accent/nn/params.hpp"

namespace accent::nn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  explicit AdamState(const ParamLayout& layout) : m(layout), v(layout) {}

  ParamSet<T> m;
  ParamSet<T> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update over flat buffers; `step` is the 1-based
/// index of this update.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::int64_t step, const AdamConfig& cfg);

/// Advances `state.step` and updates `params` in place.
template <typename T>
void optimizer_step(ModelParams<T>& params, const Gradients<T>& grads, AdamState<T>& state,
                    const AdamConfig& cfg) {
  ++state.step;
  adam_update(params.weights.flat(), grads.flat(), state.m.flat(), state.v.flat(), state.step, cfg);
}

extern template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                        std::span<float>, std::int64_t, const AdamConfig&);
extern template void adam_update<double>(std::span<double>, std::span<const double>,
                                         std::span<double>, std::span<double>, std::int64_t,
                                         const AdamConfig&);

}  // namespace accent::nn
