#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/common.hpp"

namespace tomita {

enum class Split : std::uint8_t { train, test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);

struct Sample {
  std::string text;
  Label label = Label::negative;
  Split split = Split::train;
  /// Set when the label was flipped by inject_label_noise.
  bool noisy = false;

  Label clean_label() const noexcept { return noisy ? flip(label) : label; }

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Labeled binary strings with a train/test partition. `grammar` is empty
/// for externally supplied data.
struct LabeledDataset {
  std::optional<GrammarId> grammar;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t count(Split split) const;
  std::size_t count(Split split, Label label) const;
  std::size_t count(Label label) const;
  std::vector<std::string> strings(Split split) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Per-length class counts emitted alongside a generated dataset.
struct LengthCounts {
  std::size_t length = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Draws unique strings of every length in `lengths`, labels them with the
/// grammar's oracle and keeps up to `max_per_class` strings of each class per
/// length. Lengths whose 2^N strings fit in the enumeration limit are
/// sampled without replacement from the full set; longer lengths use
/// bounded rejection sampling of uniform random strings. A class that does
/// not exist at some length is simply absent. All samples start in the
/// train split; see split_dataset.
LabeledDataset generate_dataset(GrammarId grammar, LengthRange lengths,
                                std::size_t max_per_class, std::uint64_t seed);

std::vector<LengthCounts> length_counts(const LabeledDataset& data);

/// Stratified train/test split; every class contributes round(fraction * n)
/// samples to train. InputError when either side would be empty.
LabeledDataset split_dataset(const LabeledDataset& data, double train_fraction,
                             std::uint64_t seed);

/// CSV with header `string,label,split`; labels written as 1/0.
std::string to_csv(const LabeledDataset& data);
LabeledDataset dataset_from_csv(std::string_view text, std::optional<GrammarId> grammar);

}  // namespace tomita
