#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive so that they share no code with the library.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "tomita/dfa.hpp"
#include "tomita/rng.hpp"

namespace oracle {

inline std::vector<std::string> all_strings(std::size_t n) {
  std::vector<std::string> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::string x(n, '0');
    for (std::size_t i = 0; i < n; ++i) {
      if ((bits >> (n - 1 - i)) & 1U) x[i] = '1';
    }
    out.push_back(x);
  }
  return out;
}

inline std::vector<std::string> strings_up_to(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t len = 0; len <= n; ++len) {
    auto part = all_strings(len);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Maximal runs as (symbol, length) pairs.
inline std::vector<std::pair<char, std::size_t>> runs(const std::string& x) {
  std::vector<std::pair<char, std::size_t>> out;
  for (char c : x) {
    if (!out.empty() && out.back().first == c) {
      ++out.back().second;
    } else {
      out.push_back({c, 1});
    }
  }
  return out;
}

inline bool tomita(int g, const std::string& x) {
  const auto zeros = static_cast<long>(std::count(x.begin(), x.end(), '0'));
  const auto ones = static_cast<long>(x.size()) - zeros;
  switch (g) {
    case 1:
      return zeros == 0;
    case 2: {
      if (x.size() % 2 != 0) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != (i % 2 == 0 ? '1' : '0')) return false;
      }
      return true;
    }
    case 3: {
      const auto r = runs(x);
      for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        if (r[i].first == '1' && r[i].second % 2 == 1 && r[i + 1].second % 2 == 1) return false;
      }
      return true;
    }
    case 4:
      return x.find("000") == std::string::npos;
    case 5:
      return zeros % 2 == 0 && ones % 2 == 0;
    case 6:
      return ((zeros - ones) % 3 + 3) % 3 == 0;
    case 7: {
      // Runs alternate, so 0*1*0*1* allows four runs starting with 0 and
      // three starting with 1.
      const auto r = runs(x);
      const std::size_t limit = (!r.empty() && r.front().first == '1') ? 3 : 4;
      return r.size() <= limit;
    }
  }
  return false;
}

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  // Plain recursion with memo on (i, j).
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<long(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> long {
    if (i == 0) return static_cast<long>(j);
    if (j == 0) return static_cast<long>(i);
    if (memo[i][j] >= 0) return memo[i][j];
    long best = std::min(d(i - 1, j) + 1, d(i, j - 1) + 1);
    best = std::min(best, d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1));
    return memo[i][j] = best;
  };
  return static_cast<std::size_t>(d(a.size(), b.size()));
}

inline tomita::Dfa random_dfa(tomita::Rng& rng, std::size_t n) {
  std::vector<std::size_t> delta(n * 2);
  for (auto& t : delta) t = rng.below(n);
  std::vector<bool> acc(n);
  for (std::size_t i = 0; i < n; ++i) acc[i] = rng.below(2) == 1;
  return tomita::Dfa(n, rng.below(n), delta, acc);
}

// Table-filling (Myhill-Nerode) count of distinguishable reachable states.
inline std::size_t minimal_state_count(const tomita::Dfa& d) {
  const std::size_t n = d.num_states();
  std::vector<bool> reach(n, false);
  std::vector<std::size_t> stack{d.start()};
  reach[d.start()] = true;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (std::size_t a = 0; a < 2; ++a) {
      auto t = d.next(s, a);
      if (!reach[t]) {
        reach[t] = true;
        stack.push_back(t);
      }
    }
  }
  std::vector<std::vector<bool>> marked(n, std::vector<bool>(n, false));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) marked[p][q] = d.is_accepting(p) != d.is_accepting(q);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (marked[p][q]) continue;
        for (std::size_t a = 0; a < 2; ++a) {
          if (marked[d.next(p, a)][d.next(q, a)]) {
            marked[p][q] = true;
            changed = true;
          }
        }
      }
    }
  }
  std::size_t classes = 0;
  std::vector<bool> seen(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    if (!reach[p] || seen[p]) continue;
    ++classes;
    for (std::size_t q = 0; q < n; ++q) {
      if (reach[q] && !marked[p][q]) seen[q] = true;
    }
  }
  return classes;
}

}  // namespace oracle
