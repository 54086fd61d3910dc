#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/edit_distance.hpp"
#include "tomita/model.hpp"
#include "tomita/sweep.hpp"
#include "tomita/verification.hpp"

namespace tomita::pipeline {

struct VerificationConfig {
  std::vector<int> grammars = {3, 4, 7};
  VerificationParams params;
  /// Extra lengths for a per-length sweep (empty: no sweep).
  std::vector<std::size_t> sweep_lengths;
  /// Which trained seed of each (grammar, cell) is verified.
  std::size_t seed_index = 0;
};

struct DistanceConfig {
  std::vector<int> grammars = {1, 2, 3, 4, 5, 6, 7};
  std::vector<std::size_t> lengths = {8, 10, 12, 14};
  StringMetric metric = StringMetric::substitution;
};

struct ExperimentConfig {
  std::vector<int> grammars = {1, 2, 3, 4, 5, 6, 7};
  std::vector<CellKind> cells = {CellKind::second_order};
  /// Data, model, training and extraction settings; its master seed is the
  /// experiment's master seed.
  SweepConfig sweep;
  VerificationConfig verification;
  DistanceConfig distance;
  std::filesystem::path output_dir = "out";
};

/// Named presets: paper, table3, fig4, fig5, smoke.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Fields present in `text` override those of `base`; unknown keys are
/// rejected so typos do not silently fall back to defaults.
ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& base);
std::string config_to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// A prerequisite artifact is missing or was produced by a different
/// configuration.
class StageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  std::size_t requested = 0;
  std::size_t succeeded = 0;
  bool ok() const noexcept { return requested == succeeded; }
};

/// Artifact paths under the output directory.
class Layout {
 public:
  explicit Layout(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path dataset(int grammar) const;
  std::filesystem::path manifest() const;
  std::filesystem::path checkpoint(const std::string& id) const;
  std::filesystem::path train_record(const std::string& id) const;
  std::filesystem::path train_log() const;
  std::filesystem::path dfa(const std::string& id, std::size_t k) const;
  std::filesystem::path provenance(const std::string& id, std::size_t k) const;
  std::filesystem::path extract_stamp(const std::string& id) const;
  std::filesystem::path results(std::string_view file) const;

 private:
  std::filesystem::path root_;
};

std::string model_id(int grammar, CellKind cell, std::size_t seed_index);

CommandResult cmd_gen(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_train(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_extract(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log);
/// With `oracle_as_model` the grammar's own DFA stands in for the network,
/// which needs no trained checkpoints.
CommandResult cmd_verify(const ExperimentConfig& cfg, bool oracle_as_model, std::ostream& log);
CommandResult cmd_distance(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_report(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace tomita::pipeline
