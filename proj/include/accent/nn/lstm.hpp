#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "accent/nn/params.hpp"

namespace accent::nn {

/// Raised when an activation or logit becomes NaN/inf.
class NonFiniteActivation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-step state of one direction, in processing order. Column t of `gates`
/// holds the post-activation [i; f; g; o] of step t; columns t and t+1 of
/// `cells`/`hidden` hold the state before and after it.
template <typename T>
struct DirectionCache {
  std::vector<int> channels;
  Matrix<T> gates;
  Matrix<T> cells;
  Matrix<T> hidden;
  Matrix<T> cell_tanh;
};

/// Runs one direction over `channels` (a channel id per timestep; -1 is an
/// all-zero input row) and returns the last hidden state. With `reverse` the
/// sequence is consumed from the end. Padded positions are never entered.
template <typename T>
Vector<T> lstm_direction_forward(const LstmDirectionParams<T>& params, std::span<const int> channels,
                                 bool reverse, DirectionCache<T>* cache = nullptr);

template <typename T>
Vector<T> lstm_direction_forward(const LstmDirectionParams<T>& params, const InputMatrix& matrix,
                                 int length, bool reverse, DirectionCache<T>* cache = nullptr) {
  const auto channels = channel_sequence(matrix, length);
  return lstm_direction_forward(params, std::span<const int>(channels), reverse, cache);
}

/// Backpropagates `d_last_hidden` through the cached steps, accumulating into
/// `grads`.
template <typename T>
void lstm_direction_backward(const LstmDirectionParams<T>& params, const DirectionCache<T>& cache,
                             const Vector<T>& d_last_hidden, LstmDirectionGrads<T> grads);

extern template Vector<float> lstm_direction_forward<float>(const LstmDirectionParams<float>&,
                                                            std::span<const int>, bool,
                                                            DirectionCache<float>*);
extern template Vector<double> lstm_direction_forward<double>(const LstmDirectionParams<double>&,
                                                              std::span<const int>, bool,
                                                              DirectionCache<double>*);
extern template void lstm_direction_backward<float>(const LstmDirectionParams<float>&,
                                                    const DirectionCache<float>&,
                                                    const Vector<float>&, LstmDirectionGrads<float>);
extern template void lstm_direction_backward<double>(const LstmDirectionParams<double>&,
                                                     const DirectionCache<double>&,
                                                     const Vector<double>&,
                                                     LstmDirectionGrads<double>);

}  // namespace accent::nn
