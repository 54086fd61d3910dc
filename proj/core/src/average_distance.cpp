#include "tomita/average_distance.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tomita/tomita.hpp"

namespace tomita {
namespace {

std::string bits_to_string(std::uint32_t bits, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    if ((bits >> (n - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

// Minimum distance from `x` to any member of `others`. A single flipped bit
// already gives distance 1 under both metrics, and strings of equal length
// can only be one Levenshtein edit apart through a substitution, so the N
// flips are tried first against the label table.
std::size_t min_to_class(std::uint32_t x, std::size_t n, const std::vector<std::uint8_t>& label,
                         const std::vector<std::uint32_t>& others,
                         const std::vector<std::string>& other_strings, StringMetric metric) {
  const std::uint8_t mine = label[x];
  for (std::size_t i = 0; i < n; ++i) {
    if (label[x ^ (1U << i)] != mine) return 1;
  }
  std::size_t best = std::numeric_limits<std::size_t>::max();
  if (metric == StringMetric::substitution) {
    for (std::uint32_t y : others) {
      const auto d = static_cast<std::size_t>(std::popcount(x ^ y));
      if (d < best) {
        best = d;
        if (best == 2) break;
      }
    }
  } else {
    const std::string xs = bits_to_string(x, n);
    for (const auto& ys : other_strings) {
      const std::size_t d = edit_distance(xs, ys);
      if (d < best) {
        best = d;
        if (best == 2) break;
      }
    }
  }
  return best;
}

}  // namespace

std::optional<DistanceReport> average_edit_distance_at_n(GrammarId grammar, std::size_t length,
                                                         StringMetric metric) {
  if (length > 24) throw InputError("average distance enumeration is limited to N <= 24");
  const Dfa& oracle = tomita_dfa(grammar);
  const std::uint32_t total = 1U << length;

  std::vector<std::uint8_t> label(total);
  std::array<std::vector<std::uint32_t>, 2> members;
  for (std::uint32_t x = 0; x < total; ++x) {
    label[x] = static_cast<std::uint8_t>(oracle.accepts(bits_to_string(x, length)));
    members[label[x]].push_back(x);
  }
  if (members[0].empty() || members[1].empty()) return std::nullopt;

  std::array<std::vector<std::string>, 2> strings;
  if (metric == StringMetric::levenshtein) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::uint32_t x : members[c]) strings[c].push_back(bits_to_string(x, length));
    }
  }

  DistanceReport r;
  r.grammar = grammar;
  r.length = length;
  r.metric = metric;
  r.positives = members[1].size();
  r.negatives = members[0].size();
  for (std::uint32_t x : members[1]) r.sum_pos += min_to_class(x, length, label, members[0], strings[0], metric);
  for (std::uint32_t x : members[0]) r.sum_neg += min_to_class(x, length, label, members[1], strings[1], metric);
  r.d_pos = static_cast<double>(r.sum_pos) / static_cast<double>(r.positives);
  r.d_neg = static_cast<double>(r.sum_neg) / static_cast<double>(r.negatives);
  r.d_avg = (r.d_pos + r.d_neg) / 2.0;
  return r;
}

std::string_view to_string(ComplexityClass c) noexcept {
  switch (c) {
    case ComplexityClass::unbounded: return "unbounded";
    case ComplexityClass::bounded_above_one: return "bounded_above_one";
    case ComplexityClass::equal_one: return "equal_one";
  }
  return "unknown";
}

ComplexityClass complexity_class(GrammarId grammar) noexcept {
  switch (grammar.value()) {
    case 1:
    case 2:
    case 7: return ComplexityClass::unbounded;
    case 3:
    case 4: return ComplexityClass::bounded_above_one;
    default: return ComplexityClass::equal_one;
  }
}

}  // namespace tomita
