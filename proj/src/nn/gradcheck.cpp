#include "accent/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "accent/nn/model.hpp"

namespace accent::nn {

bool GradCheckReport::passed() const {
  return std::all_of(blocks.begin(), blocks.end(),
                     [&](const BlockReport& b) { return b.max_rel_error < tolerance; });
}

const BlockReport& GradCheckReport::worst() const {
  if (blocks.empty()) throw std::logic_error("empty gradient-check report");
  return *std::max_element(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) {
    return a.max_rel_error < b.max_rel_error;
  });
}

namespace {

std::string failure_message(const GradCheckReport& report) {
  const auto& w = report.worst();
  std::ostringstream out;
  out << "gradient check failed in " << block_name(w.block) << " at coordinate " << w.worst_index
      << ": analytic " << w.analytic << " vs numeric " << w.numeric << " (relative error "
      << w.max_rel_error << " >= " << report.tolerance << ")";
  return out.str();
}

class LossFunction {
 public:
  LossFunction(std::span<const GradCheckSample> samples, std::optional<std::uint64_t> mask_seed)
      : samples_(samples), mask_seed_(mask_seed) {}

  double operator()(const ModelParams<double>& params) const {
    double total = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      SplitMix64 rng(mask_seed(i));
      const auto probs = forward(params, std::span<const int>(samples_[i].channels), true, &rng);
      total += loss(probs, samples_[i].target);
    }
    return total / static_cast<double>(samples_.size());
  }

  Gradients<double> gradient(const ModelParams<double>& params) const {
    Gradients<double> grads(params.weights.layout());
    ForwardCache<double> cache;
    const double scale = 1.0 / static_cast<double>(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      SplitMix64 rng(mask_seed(i));
      forward(params, std::span<const int>(samples_[i].channels), true, &rng, &cache);
      accumulate_gradients(params, cache, samples_[i].target, grads, scale);
    }
    return grads;
  }

 private:
  std::uint64_t mask_seed(std::size_t i) const {
    return derive_seed({mask_seed_.value_or(0), static_cast<std::uint64_t>(i)});
  }

  std::span<const GradCheckSample> samples_;
  std::optional<std::uint64_t> mask_seed_;
};

std::vector<std::size_t> sample_coordinates(std::size_t size, std::size_t wanted, SplitMix64& rng) {
  std::vector<std::size_t> index(size);
  std::iota(index.begin(), index.end(), std::size_t{0});
  if (size <= wanted) return index;
  for (std::size_t i = 0; i < wanted; ++i) {
    std::swap(index[i], index[i + rng.below(size - i)]);
  }
  index.resize(wanted);
  std::sort(index.begin(), index.end());
  return index;
}

}  // namespace

GradientCheckFailed::GradientCheckFailed(GradCheckReport report)
    : std::runtime_error(failure_message(report)), report_(std::move(report)) {}

double relative_error(double analytic, double numeric) noexcept {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport check_gradients(const ModelParams<double>& params,
                                std::span<const GradCheckSample> samples,
                                const GradCheckConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("gradient check needs at least one sample");
  if (params.arch.dropout_rate > 0.0 && !cfg.frozen_mask_seed) {
    throw std::invalid_argument(
        "gradient check with active dropout requires a frozen mask (frozen_mask_seed)");
  }
  const LossFunction loss_fn(samples, cfg.frozen_mask_seed);
  Gradients<double> analytic = loss_fn.gradient(params);
  if (cfg.corrupt_block) {
    for (auto& g : analytic.block(*cfg.corrupt_block)) g = g * 1.5 + 1e-2;
  }

  GradCheckReport report;
  report.tolerance = cfg.tolerance;
  SplitMix64 rng(cfg.seed);
  ModelParams<double> probe = params;
  for (Block block : kAllBlocks) {
    BlockReport entry;
    entry.block = block;
    const auto coords = sample_coordinates(params.weights.block(block).size(), cfg.coords_per_block, rng);
    auto values = probe.weights.block(block);
    const auto grads = analytic.block(block);
    for (std::size_t idx : coords) {
      const double original = values[idx];
      values[idx] = original + cfg.epsilon;
      const double plus = loss_fn(probe);
      values[idx] = original - cfg.epsilon;
      const double minus = loss_fn(probe);
      values[idx] = original;
      const double numeric = (plus - minus) / (2.0 * cfg.epsilon);
      const double err = relative_error(grads[idx], numeric);
      if (entry.checked == 0 || err > entry.max_rel_error) {
        entry.max_rel_error = err;
        entry.worst_index = idx;
        entry.analytic = grads[idx];
        entry.numeric = numeric;
      }
      ++entry.checked;
    }
    report.blocks.push_back(entry);
  }
  return report;
}

GradCheckReport gradient_check(const ModelParams<double>& params,
                               std::span<const GradCheckSample> samples,
                               const GradCheckConfig& cfg) {
  GradCheckReport report = check_gradients(params, samples, cfg);
  if (!report.passed()) throw GradientCheckFailed(std::move(report));
  return report;
}

}  // namespace accent::nn
