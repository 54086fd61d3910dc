#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace tomita {

/// Distance used when comparing strings against a set.
///   levenshtein   unit-cost insertion, deletion and substitution
///   substitution  substitutions only (Hamming); defined for equal lengths
enum class StringMetric { substitution, levenshtein };

std::string_view to_string(StringMetric metric) noexcept;
StringMetric parse_string_metric(std::string_view text);

/// Unit-cost Levenshtein distance, O(|a|·|b|) time and O(min) memory.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Number of differing positions. InputError when lengths differ.
std::size_t hamming_distance(std::string_view a, std::string_view b);

std::size_t string_distance(std::string_view a, std::string_view b, StringMetric metric);

/// min over s in `set` of the distance from `x` to s. InputError when the
/// set is empty.
std::size_t min_distance_to_set(std::string_view x, std::span<const std::string> set,
                                StringMetric metric = StringMetric::levenshtein);

}  // namespace tomita
