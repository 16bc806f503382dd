#pragma once

// Epoch loop with shuffled mini-batches, dev-set epoch selection and
// accuracy evaluation.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "accent/dataset.hpp"
#include "accent/encoder.hpp"
#include "accent/nn/optimizer.hpp"
#include "accent/nn/params.hpp"

namespace accent {

enum class ModelTag { DictM, CFM, CDM };

std::string_view to_string(ModelTag tag);
ModelTag parse_model_tag(std::string_view text);
ModelTag tag_for_mode(Mode mode) noexcept;
Mode mode_for_tag(ModelTag tag) noexcept;

struct TrainRunConfig {
  int epochs = 10;
  int batch_size = 128;
  std::uint64_t seed = 1;
  nn::AdamConfig adam;
  /// Use the fixed-tree gradient reduction so results are bitwise stable
  /// regardless of thread count.
  bool reproducible = false;
  ModelTag model_tag = ModelTag::CFM;
  nn::Architecture arch;
  DecodeMode dev_decode = DecodeMode::Constrained;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_train_loss = 0.0;
  double dev_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  nn::ModelParams<float> best;
  int best_epoch = 0;
  std::vector<EpochRecord> records;
};

class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(int epoch, std::size_t batch, const std::string& cause);
  int epoch() const noexcept { return epoch_; }
  std::size_t batch() const noexcept { return batch_; }

 private:
  int epoch_;
  std::size_t batch_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Runs cfg.epochs epochs and returns the parameters of the epoch with the
/// highest dev accuracy (earliest on ties).
TrainResult train(std::span<const TrainInstance> train_set, std::span<const TrainInstance> dev_set,
                  const TrainRunConfig& cfg, const EpochCallback& on_epoch = {});

/// Index of the best record: highest dev accuracy, earliest on ties.
std::size_t select_best_epoch(std::span<const EpochRecord> records);

struct AccuracyResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  /// Instances longer than the model's max_len; counted as incorrect.
  std::size_t too_long = 0;

  double accuracy() const noexcept;
};

/// Predicted stress index per instance; nullopt for instances the model
/// cannot encode because they exceed max_len.
std::vector<std::optional<std::size_t>> predict_positions(const nn::ModelParams<float>& params,
                                                          std::span<const TrainInstance> instances,
                                                          DecodeMode decode);

AccuracyResult evaluate_accuracy(const nn::ModelParams<float>& params,
                                 std::span<const TrainInstance> instances, DecodeMode decode);

/// Predicted index for a single input string.
std::size_t predict_position(const nn::ModelParams<float>& params, std::u32string_view input,
                             DecodeMode decode);

}  // namespace accent
