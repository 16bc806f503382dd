#include "accent/trainer.hpp"

#include <chrono>
#include <numeric>

#include "accent/nn/batch.hpp"
#include "accent/rng.hpp"

namespace accent {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::DictM: return "DictM";
    case ModelTag::CFM: return "CFM";
    case ModelTag::CDM: return "CDM";
  }
  return "?";
}

ModelTag parse_model_tag(std::string_view text) {
  if (text == "DictM") return ModelTag::DictM;
  if (text == "CFM") return ModelTag::CFM;
  if (text == "CDM") return ModelTag::CDM;
  throw std::invalid_argument("unknown model tag '" + std::string(text) + "'");
}

ModelTag tag_for_mode(Mode mode) noexcept {
  switch (mode) {
    case Mode::Dict: return ModelTag::DictM;
    case Mode::Cfm: return ModelTag::CFM;
    case Mode::Cdm: return ModelTag::CDM;
  }
  return ModelTag::CFM;
}

Mode mode_for_tag(ModelTag tag) noexcept {
  switch (tag) {
    case ModelTag::DictM: return Mode::Dict;
    case ModelTag::CFM: return Mode::Cfm;
    case ModelTag::CDM: return Mode::Cdm;
  }
  return Mode::Cfm;
}

void TrainRunConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  arch.validate();
}

TrainingAborted::TrainingAborted(int epoch, std::size_t batch, const std::string& cause)
    : std::runtime_error("training aborted in epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch) + ": " + cause),
      epoch_(epoch),
      batch_(batch) {}

double AccuracyResult::accuracy() const noexcept {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::size_t select_best_epoch(std::span<const EpochRecord> records) {
  if (records.empty()) throw std::invalid_argument("no epoch records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].dev_accuracy > records[best].dev_accuracy) best = i;
  }
  return best;
}

std::vector<std::optional<std::size_t>> predict_positions(const nn::ModelParams<float>& params,
                                                          std::span<const TrainInstance> instances,
                                                          DecodeMode decode) {
  const auto& enc = params.arch.encoding;
  std::vector<std::vector<int>> inputs;
  std::vector<std::size_t> slot(instances.size(), instances.size());
  inputs.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].input().size() > static_cast<std::size_t>(enc.max_len)) continue;
    slot[i] = inputs.size();
    inputs.push_back(channel_sequence(instances[i].input(), enc));
  }
  const auto probs = nn::predict_batch(params, std::span<const std::vector<int>>(inputs));
  std::vector<std::optional<std::size_t>> out(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (slot[i] == instances.size()) continue;
    const auto row = probs.row(static_cast<Eigen::Index>(slot[i]));
    out[i] = decode_position(std::span<const float>(row.data(), static_cast<std::size_t>(row.size())),
                             instances[i].input(), decode);
  }
  return out;
}

AccuracyResult evaluate_accuracy(const nn::ModelParams<float>& params,
                                 std::span<const TrainInstance> instances, DecodeMode decode) {
  AccuracyResult result;
  const auto predicted = predict_positions(params, instances, decode);
  result.total = instances.size();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!predicted[i]) {
      ++result.too_long;
    } else if (*predicted[i] == instances[i].target()) {
      ++result.correct;
    }
  }
  return result;
}

std::size_t predict_position(const nn::ModelParams<float>& params, std::u32string_view input,
                             DecodeMode decode) {
  const auto channels = channel_sequence(input, params.arch.encoding);
  const auto probs = nn::forward(params, std::span<const int>(channels), false);
  return decode_position(std::span<const float>(probs.data(), static_cast<std::size_t>(probs.size())),
                         input, decode);
}

TrainResult train(std::span<const TrainInstance> train_set, std::span<const TrainInstance> dev_set,
                  const TrainRunConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (dev_set.empty()) throw std::invalid_argument("dev set is empty");

  std::vector<std::vector<int>> inputs;
  inputs.reserve(train_set.size());
  for (const auto& instance : train_set) {
    inputs.push_back(channel_sequence(instance.input(), cfg.arch.encoding));
  }

  auto params = nn::init_params<float>(cfg.arch, derive_seed({cfg.seed, 0x696E6974ULL}));
  nn::AdamState<float> adam(params.weights.layout());
  nn::Gradients<float> grads(params.weights.layout());
  nn::GradientWorkspace<float> workspace(params.weights.layout());
  const auto reduction = cfg.reproducible ? nn::Reduction::FixedTree : nn::Reduction::PerThread;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 shuffle_rng(derive_seed({cfg.seed, 0x73687566ULL}));
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  TrainResult result;
  double best_accuracy = -1.0;
  std::vector<nn::Example> batch;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + batch_size);
      batch.clear();
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t idx = order[k];
        batch.push_back({inputs[idx], train_set[idx].target(),
                         derive_seed({cfg.seed, static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(k)})});
      }
      try {
        loss_sum += nn::batch_gradients(params, std::span<const nn::Example>(batch), grads,
                                        reduction, workspace);
      } catch (const nn::NonFiniteActivation& e) {
        throw TrainingAborted(epoch, batch_index, e.what());
      }
      nn::optimizer_step(params, grads, adam, cfg.adam);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mean_train_loss = loss_sum / static_cast<double>(order.size());
    record.dev_accuracy = evaluate_accuracy(params, dev_set, cfg.dev_decode).accuracy();
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.records.push_back(record);
    if (record.dev_accuracy > best_accuracy) {
      best_accuracy = record.dev_accuracy;
      result.best = params;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(record);
  }
  return result;
}

}  // namespace accent
