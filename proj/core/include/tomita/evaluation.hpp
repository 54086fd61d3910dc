#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/common.hpp"
#include "tomita/dataset.hpp"
#include "tomita/model.hpp"

namespace tomita {

template <class M>
concept StringClassifier = requires(const M& m, std::string_view x) {
  { m.classify(x) } -> std::convertible_to<Label>;
};

/// Wraps any callable as a classifier, e.g. a predicate or a lambda
/// that consults two models.
class FunctionClassifier {
 public:
  explicit FunctionClassifier(std::function<Label(std::string_view)> fn) : fn_(std::move(fn)) {}
  Label classify(std::string_view x) const { return fn_(x); }

 private:
  std::function<Label(std::string_view)> fn_;
};

/// Fraction of samples whose recorded label matches the classifier.
/// InputError on an empty sample list.
template <StringClassifier M>
double accuracy(const M& m, std::span<const Sample> samples) {
  if (samples.empty()) throw InputError("accuracy over an empty sample set");
  std::size_t hits = 0;
  for (const auto& s : samples) hits += (m.classify(s.text) == s.label) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

template <StringClassifier M>
double accuracy(const M& m, const LabeledDataset& data, Split split) {
  std::vector<Sample> part;
  for (const auto& s : data.samples) {
    if (s.split == split) part.push_back(s);
  }
  if (part.empty()) {
    throw InputError("accuracy: " + std::string(to_string(split)) + " split is empty");
  }
  return accuracy(m, std::span<const Sample>(part));
}

/// Fraction of strings on which both classifiers agree.
template <StringClassifier A, StringClassifier B>
double fidelity(const A& a, const B& b, std::span<const std::string> strings) {
  if (strings.empty()) throw InputError("fidelity over an empty string set");
  std::size_t agree = 0;
  for (const auto& x : strings) agree += (a.classify(x) == b.classify(x)) ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(strings.size());
}

/// Flips the labels of `n_pos` positive and `n_neg` negative training
/// samples (chosen by clean label) and toggles their `noisy` flag. Applying
/// it twice with the same seed restores the input.
LabeledDataset inject_label_noise(const LabeledDataset& data, std::size_t n_pos, std::size_t n_neg,
                                  std::uint64_t seed);

/// One extraction trial. `rnn_accuracy_noisy` is the source network's
/// accuracy on its own (noise-injected) training labels and is only set when
/// noise was injected.
struct TrialResult {
  int grammar = 0;
  CellKind cell = CellKind::second_order;
  std::uint64_t hidden_seed = 0;
  std::size_t k = 0;
  std::size_t effective_k = 0;
  std::uint64_t kmeans_seed = 0;
  double dfa_accuracy = 0.0;
  double rnn_accuracy_clean = 0.0;
  std::optional<double> rnn_accuracy_noisy;
  double fidelity = 0.0;
  bool success = false;
  std::size_t extracted_states = 0;
  /// Non-empty when the trial failed; metrics are then zero.
  std::string error;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

/// Fraction of trials whose extracted DFA is perfect on the test split.
/// InputError on an empty list.
double success_rate(std::span<const TrialResult> results);

struct SweepSummaryRow {
  int grammar = 0;
  CellKind cell = CellKind::second_order;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;  ///< trials that raised an error
  double mean_dfa_accuracy = 0.0;
  double var_dfa_accuracy = 0.0;  ///< population variance
  double success_rate = 0.0;
  double mean_fidelity = 0.0;

  friend bool operator==(const SweepSummaryRow&, const SweepSummaryRow&) = default;
};

/// Per (grammar, cell) aggregate in ascending (grammar, cell) order.
std::vector<SweepSummaryRow> summarize(std::span<const TrialResult> results);

std::string trials_to_csv(std::span<const TrialResult> results);
std::vector<TrialResult> trials_from_csv(std::string_view text);
std::string summary_to_csv(std::span<const SweepSummaryRow> rows);

/// Shortest decimal that round-trips, used in every CSV report.
std::string format_double(double v);

}  // namespace tomita
