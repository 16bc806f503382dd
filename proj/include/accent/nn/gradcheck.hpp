#pragma once

// Central finite-difference verification of backward() in double precision.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "accent/nn/params.hpp"

namespace accent::nn {

struct GradCheckConfig {
  double tolerance = 1e-3;
  double epsilon = 1e-4;
  /// Coordinates sampled per block; smaller blocks are checked in full.
  std::size_t coords_per_block = 200;
  std::uint64_t seed = 0;
  /// Freezes the dropout masks: instance i always draws its mask from a seed
  /// derived from this value. Required when dropout_rate > 0.
  std::optional<std::uint64_t> frozen_mask_seed;
  /// Test hook: perturbs the analytic gradient of one block.
  std::optional<Block> corrupt_block;
};

struct GradCheckSample {
  std::vector<int> channels;
  std::size_t target = 0;
};

struct BlockReport {
  Block block = Block::FwdW;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<BlockReport> blocks;
  double tolerance = 0.0;

  bool passed() const;
  const BlockReport& worst() const;
};

class GradientCheckFailed : public std::runtime_error {
 public:
  explicit GradientCheckFailed(GradCheckReport report);
  const GradCheckReport& report() const noexcept { return report_; }

 private:
  GradCheckReport report_;
};

/// Relative error with denominators floored at 1e-6, so coordinates whose
/// true gradient is ~0 are judged on absolute error.
double relative_error(double analytic, double numeric) noexcept;

/// Mean loss over `samples` compared against the mean analytic gradient.
GradCheckReport check_gradients(const ModelParams<double>& params,
                                std::span<const GradCheckSample> samples,
                                const GradCheckConfig& cfg);

/// As check_gradients, but throws GradientCheckFailed when any block exceeds
/// the tolerance.
GradCheckReport gradient_check(const ModelParams<double>& params,
                               std::span<const GradCheckSample> samples,
                               const GradCheckConfig& cfg);

}  // namespace accent::nn
