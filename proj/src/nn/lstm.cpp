#include "accent/nn/lstm.hpp"

#include <algorithm>

namespace accent::nn {

namespace {

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using T = typename Derived::Scalar;
  return (T(1) + (-x).exp()).inverse();
}

}  // namespace

template <typename T>
Vector<T> lstm_direction_forward(const LstmDirectionParams<T>& params, std::span<const int> channels,
                                 bool reverse, DirectionCache<T>* cache) {
  const Eigen::Index h = params.U.cols();
  const Eigen::Index steps = static_cast<Eigen::Index>(channels.size());
  Vector<T> hidden = Vector<T>::Zero(h);
  Vector<T> cell = Vector<T>::Zero(h);
  Vector<T> pre(4 * h);

  if (cache) {
    cache->channels.assign(channels.begin(), channels.end());
    if (reverse) std::reverse(cache->channels.begin(), cache->channels.end());
    cache->gates.resize(4 * h, steps);
    cache->cells.resize(h, steps + 1);
    cache->hidden.resize(h, steps + 1);
    cache->cell_tanh.resize(h, steps);
    cache->cells.col(0).setZero();
    cache->hidden.col(0).setZero();
  }

  for (Eigen::Index t = 0; t < steps; ++t) {
    const int ch = channels[static_cast<std::size_t>(reverse ? steps - 1 - t : t)];
    pre.noalias() = params.U * hidden;
    pre += params.b;
    if (ch >= 0) pre += params.W.col(ch);

    auto a = pre.array();
    a.head(2 * h) = sigmoid(a.head(2 * h));
    a.segment(2 * h, h) = a.segment(2 * h, h).tanh();
    a.tail(h) = sigmoid(a.tail(h));

    cell.array() = a.segment(h, h) * cell.array() + a.head(h) * a.segment(2 * h, h);
    const Vector<T> tc = cell.array().tanh().matrix();
    hidden.array() = a.tail(h) * tc.array();

    if (cache) {
      cache->gates.col(t) = pre;
      cache->cells.col(t + 1) = cell;
      cache->hidden.col(t + 1) = hidden;
      cache->cell_tanh.col(t) = tc;
    }
  }
  if (!hidden.allFinite()) throw NonFiniteActivation("non-finite LSTM hidden state");
  return hidden;
}

template <typename T>
void lstm_direction_backward(const LstmDirectionParams<T>& params, const DirectionCache<T>& cache,
                             const Vector<T>& d_last_hidden, LstmDirectionGrads<T> grads) {
  const Eigen::Index h = params.U.cols();
  const Eigen::Index steps = static_cast<Eigen::Index>(cache.channels.size());
  if (steps == 0) return;

  Matrix<T> d_pre(4 * h, steps);
  Vector<T> dh = d_last_hidden;
  Vector<T> dc = Vector<T>::Zero(h);

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto g = cache.gates.col(t).array();
    const auto i_gate = g.head(h);
    const auto f_gate = g.segment(h, h);
    const auto cand = g.segment(2 * h, h);
    const auto o_gate = g.tail(h);
    const auto tc = cache.cell_tanh.col(t).array();
    const auto c_prev = cache.cells.col(t).array();

    dc.array() += dh.array() * o_gate * (T(1) - tc.square());
    auto d = d_pre.col(t).array();
    d.head(h) = dc.array() * cand * i_gate * (T(1) - i_gate);
    d.segment(h, h) = dc.array() * c_prev * f_gate * (T(1) - f_gate);
    d.segment(2 * h, h) = dc.array() * i_gate * (T(1) - cand.square());
    d.tail(h) = dh.array() * tc * o_gate * (T(1) - o_gate);

    dc.array() *= f_gate;
    dh.noalias() = params.U.transpose() * d_pre.col(t);
  }

  for (Eigen::Index t = 0; t < steps; ++t) {
    const int ch = cache.channels[static_cast<std::size_t>(t)];
    if (ch >= 0) grads.W.col(ch) += d_pre.col(t);
  }
  grads.b += d_pre.rowwise().sum();
  grads.U.noalias() += d_pre * cache.hidden.leftCols(steps).transpose();
}

template Vector<float> lstm_direction_forward<float>(const LstmDirectionParams<float>&,
                                                     std::span<const int>, bool,
                                                     DirectionCache<float>*);
template Vector<double> lstm_direction_forward<double>(const LstmDirectionParams<double>&,
                                                       std::span<const int>, bool,
                                                       DirectionCache<double>*);
template void lstm_direction_backward<float>(const LstmDirectionParams<float>&,
                                             const DirectionCache<float>&, const Vector<float>&,
                                             LstmDirectionGrads<float>);
template void lstm_direction_backward<double>(const LstmDirectionParams<double>&,
                                              const DirectionCache<double>&, const Vector<double>&,
                                              LstmDirectionGrads<double>);

}  // namespace accent::nn
