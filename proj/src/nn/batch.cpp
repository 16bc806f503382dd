#include "accent/nn/batch.hpp"

#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace accent::nn {

namespace {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int thread_id() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

// Exceptions may not leave an OpenMP region; keep the one from the lowest
// instance index and rethrow it afterwards.
class FirstError {
 public:
  void record(std::size_t index, std::exception_ptr error) {
#pragma omp critical(accent_first_error)
    {
      if (index < index_) {
        index_ = index;
        error_ = std::move(error);
      }
    }
  }
  void rethrow_if_any() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::size_t index_ = std::numeric_limits<std::size_t>::max();
  std::exception_ptr error_;
};

template <typename T>
double accumulate_example(const ModelParams<T>& params, const Example& example, ParamSet<T>& into,
                          ForwardCache<T>& cache) {
  SplitMix64 rng(example.dropout_seed);
  const Vector<T> probs = forward(params, example.channels, true, &rng, &cache);
  accumulate_gradients(params, cache, example.target, into);
  return loss(probs, example.target);
}

}  // namespace

template <typename T>
double batch_gradients(const ModelParams<T>& params, std::span<const Example> batch,
                       ParamSet<T>& grads, Reduction reduction, GradientWorkspace<T>& workspace) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const std::size_t n = batch.size();
  FirstError error;
  double loss_sum = 0.0;

  if (reduction == Reduction::FixedTree) {
    const std::size_t leaves = std::min(kTreeLeaves, n);
    std::vector<double> leaf_loss(leaves, 0.0);
    for (std::size_t k = 0; k < leaves; ++k) workspace.partial(k).set_zero();
    const auto leaf_count = static_cast<std::ptrdiff_t>(leaves);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < leaf_count; ++k) {
      const auto leaf = static_cast<std::size_t>(k);
      ForwardCache<T> cache;
      const std::size_t begin = leaf * n / leaves;
      const std::size_t end = (leaf + 1) * n / leaves;
      for (std::size_t i = begin; i < end; ++i) {
        try {
          leaf_loss[leaf] += accumulate_example(params, batch[i], workspace.partial(leaf), cache);
        } catch (...) {
          error.record(i, std::current_exception());
          break;
        }
      }
    }
    error.rethrow_if_any();
    for (std::size_t stride = 1; stride < leaves; stride *= 2) {
      for (std::size_t k = 0; k + stride < leaves; k += 2 * stride) {
        workspace.partial(k) += workspace.partial(k + stride);
        leaf_loss[k] += leaf_loss[k + stride];
      }
    }
    loss_sum = leaf_loss[0];
    grads = workspace.partial(0);
  } else {
    const int threads = max_threads();
    std::vector<double> thread_loss(static_cast<std::size_t>(threads), 0.0);
    for (int k = 0; k < threads; ++k) workspace.partial(static_cast<std::size_t>(k)).set_zero();
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel
    {
      const auto tid = static_cast<std::size_t>(thread_id());
      ForwardCache<T> cache;
#pragma omp for schedule(dynamic, 4)
      for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
          thread_loss[tid] += accumulate_example(params, batch[static_cast<std::size_t>(i)],
                                                 workspace.partial(tid), cache);
        } catch (...) {
          error.record(static_cast<std::size_t>(i), std::current_exception());
        }
      }
    }
    error.rethrow_if_any();
    grads = workspace.partial(0);
    loss_sum = thread_loss[0];
    for (int k = 1; k < threads; ++k) {
      grads += workspace.partial(static_cast<std::size_t>(k));
      loss_sum += thread_loss[static_cast<std::size_t>(k)];
    }
  }
  grads *= static_cast<T>(1.0 / static_cast<double>(n));
  return loss_sum;
}

template <typename T>
double batch_gradients_serial(const ModelParams<T>& params, std::span<const Example> batch,
                              ParamSet<T>& grads) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  grads = ParamSet<T>(params.weights.layout());
  ForwardCache<T> cache;
  double loss_sum = 0.0;
  for (const auto& example : batch) loss_sum += accumulate_example(params, example, grads, cache);
  grads *= static_cast<T>(1.0 / static_cast<double>(batch.size()));
  return loss_sum;
}

template <typename T>
RowMatrix<T> predict_batch(const ModelParams<T>& params, std::span<const std::vector<int>> inputs) {
  RowMatrix<T> probs(static_cast<Eigen::Index>(inputs.size()), params.arch.encoding.max_len);
  FirstError error;
  const auto count = static_cast<std::ptrdiff_t>(inputs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      probs.row(i) = forward(params, std::span<const int>(inputs[static_cast<std::size_t>(i)]), false)
                         .transpose();
    } catch (...) {
      error.record(static_cast<std::size_t>(i), std::current_exception());
    }
  }
  error.rethrow_if_any();
  return probs;
}

template <typename T>
RowMatrix<T> predict_batch_serial(const ModelParams<T>& params,
                                  std::span<const std::vector<int>> inputs) {
  RowMatrix<T> probs(static_cast<Eigen::Index>(inputs.size()), params.arch.encoding.max_len);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    probs.row(static_cast<Eigen::Index>(i)) =
        forward(params, std::span<const int>(inputs[i]), false).transpose();
  }
  return probs;
}

template double batch_gradients<float>(const ModelParams<float>&, std::span<const Example>,
                                       ParamSet<float>&, Reduction, GradientWorkspace<float>&);
template double batch_gradients<double>(const ModelParams<double>&, std::span<const Example>,
                                        ParamSet<double>&, Reduction, GradientWorkspace<double>&);
template double batch_gradients_serial<float>(const ModelParams<float>&, std::span<const Example>,
                                              ParamSet<float>&);
template double batch_gradients_serial<double>(const ModelParams<double>&,
                                               std::span<const Example>, ParamSet<double>&);
template RowMatrix<float> predict_batch<float>(const ModelParams<float>&,
                                               std::span<const std::vector<int>>);
template RowMatrix<double> predict_batch<double>(const ModelParams<double>&,
                                                 std::span<const std::vector<int>>);
template RowMatrix<float> predict_batch_serial<float>(const ModelParams<float>&,
                                                      std::span<const std::vector<int>>);
template RowMatrix<double> predict_batch_serial<double>(const ModelParams<double>&,
                                                        std::span<const std::vector<int>>);

}  // namespace accent::nn
