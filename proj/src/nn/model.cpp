#include "accent/nn/model.hpp"

#include <stdexcept>

namespace accent::nn {

template <typename T>
Vector<T> forward(const ModelParams<T>& params, std::span<const int> channels, bool training,
                  SplitMix64* rng, ForwardCache<T>* cache) {
  const auto& arch = params.arch;
  if (channels.size() > static_cast<std::size_t>(arch.encoding.max_len)) {
    throw InstanceTooLong(channels.size(), static_cast<std::size_t>(arch.encoding.max_len));
  }
  const int h = arch.hidden;
  const bool use_dropout = training && arch.dropout_rate > 0.0;
  if (use_dropout && rng == nullptr) {
    throw std::invalid_argument("training-mode forward with dropout needs a generator");
  }

  Vector<T> features(2 * h);
  features.head(h) = lstm_direction_forward(params.weights.direction(Direction::Forward), channels,
                                            false, cache ? &cache->fwd : nullptr);
  features.tail(h) = lstm_direction_forward(params.weights.direction(Direction::Backward), channels,
                                            true, cache ? &cache->bwd : nullptr);

  Vector<T> mask = Vector<T>::Ones(2 * h);
  if (use_dropout) {
    const double keep = 1.0 - arch.dropout_rate;
    const T scale = static_cast<T>(1.0 / keep);
    for (Eigen::Index j = 0; j < mask.size(); ++j) mask[j] = rng->uniform() < keep ? scale : T(0);
  }
  Vector<T> dropped = features.cwiseProduct(mask);

  Vector<T> logits = params.weights.vector(Block::DenseB);
  logits.noalias() += params.weights.matrix(Block::DenseW) * dropped;
  if (!logits.allFinite()) throw NonFiniteActivation("non-finite logits");

  Vector<T> probs = (logits.array() - logits.maxCoeff()).exp().matrix();
  probs /= probs.sum();

  if (cache) {
    cache->features = std::move(features);
    cache->mask = std::move(mask);
    cache->dropped = std::move(dropped);
    cache->logits = std::move(logits);
    cache->probs = probs;
  }
  return probs;
}

template <typename T>
void accumulate_gradients(const ModelParams<T>& params, const ForwardCache<T>& cache,
                          std::size_t target, ParamSet<T>& grads, T scale) {
  const int h = params.arch.hidden;
  Vector<T> d_logits = cache.probs;
  d_logits[static_cast<Eigen::Index>(target)] -= T(1);
  d_logits *= scale;

  grads.matrix(Block::DenseW).noalias() += d_logits * cache.dropped.transpose();
  grads.vector(Block::DenseB) += d_logits;

  Vector<T> d_features = params.weights.matrix(Block::DenseW).transpose() * d_logits;
  d_features.array() *= cache.mask.array();

  lstm_direction_backward(params.weights.direction(Direction::Forward), cache.fwd,
                          Vector<T>(d_features.head(h)), grads.direction_grads(Direction::Forward));
  lstm_direction_backward(params.weights.direction(Direction::Backward), cache.bwd,
                          Vector<T>(d_features.tail(h)), grads.direction_grads(Direction::Backward));
}

template Vector<float> forward<float>(const ModelParams<float>&, std::span<const int>, bool,
                                      SplitMix64*, ForwardCache<float>*);
template Vector<double> forward<double>(const ModelParams<double>&, std::span<const int>, bool,
                                        SplitMix64*, ForwardCache<double>*);
template void accumulate_gradients<float>(const ModelParams<float>&, const ForwardCache<float>&,
                                          std::size_t, ParamSet<float>&, float);
template void accumulate_gradients<double>(const ModelParams<double>&, const ForwardCache<double>&,
                                           std::size_t, ParamSet<double>&, double);

}  // namespace accent::nn
