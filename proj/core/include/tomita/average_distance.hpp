#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "tomita/common.hpp"
#include "tomita/edit_distance.hpp"

namespace tomita {

/// Average distance between the accepted and rejected strings of one
/// length. Sums are kept as integers; the means are divided once.
struct DistanceReport {
  GrammarId grammar{1};
  std::size_t length = 0;
  StringMetric metric = StringMetric::substitution;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t sum_pos = 0;  ///< Σ over positives of the distance to the negative set
  std::size_t sum_neg = 0;  ///< Σ over negatives of the distance to the positive set
  double d_pos = 0.0;
  double d_neg = 0.0;
  double d_avg = 0.0;  ///< (d_pos + d_neg) / 2
};

/// Enumerates all 2^N strings of length N, splits them with the grammar's
/// oracle and averages the per-string minimum distance to the opposite
/// class in each direction. Returns nullopt when either class is empty at
/// this length (e.g. grammar 2 at odd N).
///
/// The default substitution metric reproduces the published per-length
/// table; Levenshtein is available for comparison. N is limited to 24.
std::optional<DistanceReport> average_edit_distance_at_n(
    GrammarId grammar, std::size_t length, StringMetric metric = StringMetric::substitution);

enum class ComplexityClass { unbounded, bounded_above_one, equal_one };

std::string_view to_string(ComplexityClass c) noexcept;

/// Limit behaviour of the average distance as N grows:
/// {1,2,7} unbounded, {3,4} bounded above one, {5,6} exactly one.
ComplexityClass complexity_class(GrammarId grammar) noexcept;

}  // namespace tomita
