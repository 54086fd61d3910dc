#include "tomita/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "tomita/rng.hpp"

namespace tomita {
namespace {

double split_accuracy(const RnnModel& model, const LabeledDataset& data, Split split) {
  std::size_t total = 0, correct = 0;
  for (const auto& s : data.samples) {
    if (s.split != split) continue;
    ++total;
    correct += model.classify(s.text) == s.label ? 1U : 0U;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

TrainConfig default_train_config(CellKind kind) {
  TrainConfig cfg;
  cfg.learning_rate = (kind == CellKind::elman || kind == CellKind::mi_rnn) ? 0.01 : 0.1;
  return cfg;
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw InputError("momentum must be in [0, 1)");
  if (cfg.batch_size == 0) throw InputError("batch size must be positive");
  if (!(cfg.target_accuracy > 0.0 && cfg.target_accuracy <= 1.0)) {
    throw InputError("target accuracy must be in (0, 1]");
  }
  if (cfg.target_loss < 0.0) throw InputError("target loss must be non-negative");
  if (!(cfg.clip_norm > 0.0)) throw InputError("clip norm must be positive");
}

TrainResult train(RnnModel model, const LabeledDataset& data, const TrainConfig& cfg) {
  validate(cfg);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (data.samples[i].split == Split::train) order.push_back(i);
  }
  if (order.empty()) throw InputError("training split is empty");
  const bool has_test = data.count(Split::test) > 0;

  TrainingLog log;
  log.parameter_count = model.parameter_count();
  Rng rng(cfg.seed);
  Gradients velocity = model.zero_gradients();

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      Gradients grads = model.zero_gradients();
      for (std::size_t j = begin; j < end; ++j) {
        const Sample& s = data.samples[order[j]];
        loss_sum += model.accumulate_gradient(s.text, s.label, grads);
      }
      if (!std::isfinite(loss_sum)) {
        std::ostringstream msg;
        msg << "non-finite loss in epoch " << epoch << " (learning rate " << cfg.learning_rate
            << " is likely too high)";
        throw TrainingError(msg.str());
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      double norm2 = 0.0;
      for (auto& g : grads) {
        for (double& v : g) {
          v *= inv;
          norm2 += v * v;
        }
      }
      const double norm = std::sqrt(norm2);
      const double clip = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;
      auto params = model.mutable_parameters();
      for (std::size_t t = 0; t < params.size(); ++t) {
        auto& values = params[t].values;
        for (std::size_t k = 0; k < values.size(); ++k) {
          velocity[t][k] = cfg.momentum * velocity[t][k] - cfg.learning_rate * clip * grads[t][k];
          values[k] += velocity[t][k];
        }
      }
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(order.size());
    row.train_accuracy = split_accuracy(model, data, Split::train);
    row.test_accuracy = has_test ? split_accuracy(model, data, Split::test) : row.train_accuracy;
    log.epochs.push_back(row);
    if (row.test_accuracy >= cfg.target_accuracy &&
        (cfg.target_loss == 0.0 || row.train_loss <= cfg.target_loss)) {
      break;
    }
  }

  if (log.epochs.empty()) {
    log.final_train_accuracy = split_accuracy(model, data, Split::train);
    log.final_test_accuracy =
        has_test ? split_accuracy(model, data, Split::test) : log.final_train_accuracy;
  } else {
    log.final_train_accuracy = log.epochs.back().train_accuracy;
    log.final_test_accuracy = log.epochs.back().test_accuracy;
  }
  log.reached_target = log.final_test_accuracy >= cfg.target_accuracy;
  return {std::move(model), std::move(log)};
}

}  // namespace tomita
