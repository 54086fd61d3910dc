#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tomita/dataset.hpp"
#include "tomita/model.hpp"

namespace tomita {

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  std::size_t max_epochs = 300;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  /// Training stops once test accuracy reaches this value...
  double target_accuracy = 1.0;
  /// ...and the mean training loss is at or below this value (0 disables).
  double target_loss = 0.0;
  /// Global L2 norm bound applied to each batch gradient.
  double clip_norm = 5.0;
};

/// Defaults tuned per cell: sigmoid second-order and gated cells tolerate
/// a learning rate of 0.1, the tanh Elman and MI cells need 0.01.
TrainConfig default_train_config(CellKind kind);

/// InputError unless every field is positive and target_accuracy is in (0, 1].
void validate(const TrainConfig& cfg);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  std::size_t parameter_count = 0;
  bool reached_target = false;
  double final_test_accuracy = 0.0;
  double final_train_accuracy = 0.0;
};

struct TrainResult {
  RnnModel model;
  TrainingLog log;
};

/// Raised when the loss becomes NaN or infinite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minibatch gradient descent with momentum on the final-step cross-entropy,
/// full backpropagation through time, gradient-norm clipping. Batches are
/// drawn from the train split in a seeded order; accuracies are measured at
/// the end of each epoch. When the test split is empty the train accuracy
/// stands in for it.
TrainResult train(RnnModel model, const LabeledDataset& data, const TrainConfig& cfg);

}  // namespace tomita
