#include "tomita/edit_distance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "tomita/common.hpp"

namespace tomita {

std::string_view to_string(StringMetric metric) noexcept {
  return metric == StringMetric::substitution ? "substitution" : "levenshtein";
}

StringMetric parse_string_metric(std::string_view text) {
  if (text == "substitution" || text == "hamming") return StringMetric::substitution;
  if (text == "levenshtein") return StringMetric::levenshtein;
  throw InputError("unknown string metric '" + std::string(text) + "'");
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1U : 0U)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t hamming_distance(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    throw InputError("substitution distance needs strings of equal length");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1U : 0U;
  return d;
}

std::size_t string_distance(std::string_view a, std::string_view b, StringMetric metric) {
  return metric == StringMetric::substitution ? hamming_distance(a, b) : edit_distance(a, b);
}

std::size_t min_distance_to_set(std::string_view x, std::span<const std::string> set,
                                StringMetric metric) {
  if (set.empty()) throw InputError("distance to an empty set is undefined");
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (const auto& s : set) {
    best = std::min(best, string_distance(x, s, metric));
    if (best == 0) break;
  }
  return best;
}

}  // namespace tomita
