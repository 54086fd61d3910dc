#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tomita/dataset.hpp"
#include "tomita/evaluation.hpp"
#include "tomita/extraction.hpp"
#include "tomita/model.hpp"
#include "tomita/train.hpp"

namespace tomita {

struct DataConfig {
  LengthRange lengths{1, 14};
  std::size_t max_per_class = 50;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

/// generate_dataset + split_dataset with per-grammar seeds derived from
/// `cfg.seed`.
LabeledDataset make_dataset(GrammarId grammar, const DataConfig& cfg);

struct ModelConfig {
  std::size_t hidden_size = 8;
  /// When set, each cell's hidden size is chosen to match this parameter count.
  std::optional<std::size_t> parameter_budget;
  /// Overrides default_weight_range for every cell.
  std::optional<double> weight_range;
};

std::size_t hidden_size_for(CellKind kind, const ModelConfig& cfg);

struct SweepConfig {
  DataConfig data;
  ModelConfig model;
  std::size_t max_epochs = 1000;
  /// Training continues past perfect test accuracy until the mean loss is
  /// at or below this value (0 stops at the accuracy target).
  double target_loss = 1e-3;
  /// Replaces the per-cell learning rate when set.
  std::optional<double> learning_rate;
  std::vector<std::size_t> k_values = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::size_t hidden_seeds = 10;
  std::size_t kmeans_max_iters = 100;
  std::size_t kmeans_restarts = 3;
  VoteMode votes = VoteMode::every_prefix;
  /// Training labels flipped per class before training (0 disables noise).
  std::size_t noise_pos = 0;
  std::size_t noise_neg = 0;
  std::uint64_t master_seed = 0;
};

/// Seeds of one (grammar, cell, seed index) model, all derived from the
/// master seed so any trial can be recomputed in isolation.
struct TrialSeeds {
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
  std::uint64_t noise = 0;
};

TrialSeeds trial_seeds(std::uint64_t master, GrammarId grammar, CellKind cell,
                       std::size_t seed_index);
std::uint64_t kmeans_seed_for(std::uint64_t master, GrammarId grammar, CellKind cell,
                              std::size_t seed_index, std::size_t k);

TrainConfig train_config_for(CellKind kind, const SweepConfig& cfg, std::uint64_t shuffle_seed);

/// Applies label noise when configured; otherwise returns `clean`.
LabeledDataset training_data(const LabeledDataset& clean, const SweepConfig& cfg,
                             std::uint64_t noise_seed);

/// Initializes and trains one model on `train_data`.
TrainResult train_trial_model(GrammarId grammar, CellKind cell, std::size_t seed_index,
                              const LabeledDataset& train_data, const SweepConfig& cfg);

/// Scores an already extracted DFA: accuracy on the clean test split,
/// network accuracy, fidelity between the two on the test strings.
TrialResult score_extraction(const RnnModel& model, const ExtractedDfa& extracted,
                             GrammarId grammar, const LabeledDataset& clean,
                             const LabeledDataset& train_data, const SweepConfig& cfg);

ExtractionConfig extraction_config_for(std::size_t k, std::uint64_t kmeans_seed,
                                       const SweepConfig& cfg);

/// Extracts at one K from a trained model and scores the result against
/// the clean test split. `train_data` supplies the traces and, when it
/// carries noise, the noisy-label accuracy. Failures land in `error`.
TrialResult run_trial(const RnnModel& model, GrammarId grammar, const LabeledDataset& clean,
                      const LabeledDataset& train_data, std::size_t k, std::uint64_t kmeans_seed,
                      const SweepConfig& cfg);

struct SweepResult {
  std::vector<TrialResult> trials;
  std::vector<SweepSummaryRow> summary;
};

/// Called after every finished trial; useful for progress output.
using SweepObserver = std::function<void(const TrialResult&)>;

/// One model per (grammar, cell, seed index), reused across every K. Trial
/// order is (grammar, cell, seed, K). A failed trial is recorded with its
/// error and the sweep continues.
SweepResult run_sweep(std::span<const GrammarId> grammars, std::span<const CellKind> cells,
                      const SweepConfig& cfg, const SweepObserver& observer = {});

}  // namespace tomita
