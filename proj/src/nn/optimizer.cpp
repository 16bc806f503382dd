#include "accent/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace accent::nn {

template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v,
                 std::int64_t step, const AdamConfig& cfg) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size()) {
    throw std::invalid_argument("adam_update: buffer sizes differ");
  }
  if (step < 1) throw std::invalid_argument("adam_update: step must be >= 1");
  const double t = static_cast<double>(step);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(cfg.beta1, t));
  const T correction2 = static_cast<T>(1.0 - std::pow(cfg.beta2, t));
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  const std::size_t n = params.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T g = grads[i];
    m[i] = b1 * m[i] + (T(1) - b1) * g;
    v[i] = b2 * v[i] + (T(1) - b2) * g * g;
    const T m_hat = m[i] / correction1;
    const T v_hat = v[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template void adam_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                 std::span<float>, std::int64_t, const AdamConfig&);
template void adam_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                  std::span<double>, std::int64_t, const AdamConfig&);

}  // namespace accent::nn
