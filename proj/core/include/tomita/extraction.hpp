#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/dataset.hpp"
#include "tomita/dfa.hpp"
#include "tomita/model.hpp"

namespace tomita {

/// Which hidden states label a cluster. `final_state` counts one vote per
/// trace, from the cluster of its last hidden vector. `every_prefix` counts
/// the network's decision at every time step, so clusters that are only
/// passed through still receive a label.
enum class VoteMode { every_prefix, final_state };

std::string_view to_string(VoteMode mode) noexcept;
VoteMode parse_vote_mode(std::string_view text);

struct ExtractionConfig {
  std::size_t k = 10;
  std::uint64_t kmeans_seed = 0;
  std::size_t kmeans_max_iters = 100;
  std::size_t restarts = 3;
  VoteMode votes = VoteMode::every_prefix;
};

/// InputError unless k >= 2 and restarts >= 1.
void validate(const ExtractionConfig& cfg);

/// Stage-labelled failure inside the extraction pipeline.
class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cluster id of every hidden vector, indexed [trace][time step].
struct Quantization {
  std::size_t requested_k = 0;
  std::size_t effective_k = 0;
  double wcss = 0.0;
  std::vector<std::vector<std::size_t>> clusters;
};

/// k-means over all hidden vectors h_0..h_T of all traces. When the traces
/// hold fewer than k distinct vectors the cluster count is reduced and the
/// reduction recorded in `effective_k`.
Quantization quantize(std::span<const HiddenTrace> traces, const ExtractionConfig& cfg);

/// Observed cluster-to-cluster transitions per input symbol.
class TransitionDiagram {
 public:
  explicit TransitionDiagram(std::size_t clusters);

  std::size_t num_clusters() const noexcept { return clusters_; }
  std::size_t count(std::size_t from, int symbol, std::size_t to) const;
  void add(std::size_t from, int symbol, std::size_t to, std::size_t n = 1);
  /// Observed transitions that consume `symbol` from `from`.
  std::size_t outgoing(std::size_t from, int symbol) const;
  std::size_t total() const;

  std::size_t initial_cluster = 0;
  /// votes[c][label]: network decisions on states that fell in c.
  std::vector<std::array<std::size_t, 2>> votes;

 private:
  std::size_t clusters_;
  std::vector<std::size_t> counts_;
};

TransitionDiagram build_diagram(std::span<const HiddenTrace> traces, const Quantization& q,
                                VoteMode votes = VoteMode::every_prefix);

/// One successor per (cluster, symbol): the most frequent (ties to the
/// lowest cluster id); unobserved pairs lead to an extra rejecting sink.
/// A cluster accepts when its positive votes outnumber its negative ones.
Dfa prune_to_dfa(const TransitionDiagram& diagram);

struct Provenance {
  std::string model_id;
  std::optional<int> grammar;
  std::string cell;
  std::size_t k = 0;
  std::size_t effective_k = 0;
  std::uint64_t hidden_seed = 0;
  std::uint64_t kmeans_seed = 0;
  std::size_t trial = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

std::string provenance_to_json(const Provenance& p);
Provenance provenance_from_json(std::string_view text);

struct ExtractedDfa {
  Dfa dfa;
  Provenance provenance;
};

/// quantize -> build_diagram -> prune_to_dfa -> minimize.
ExtractedDfa extract_from_traces(std::span<const HiddenTrace> traces, const ExtractionConfig& cfg,
                                 Provenance provenance = {});

/// Records traces of the training split and extracts a minimized DFA.
ExtractedDfa extract_dfa(const RnnModel& model, const LabeledDataset& data,
                         const ExtractionConfig& cfg, Provenance provenance = {});

}  // namespace tomita
