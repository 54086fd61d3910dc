#include "tomita/tomita.hpp"

#include <vector>

namespace tomita {
namespace {

Dfa make(std::size_t n, std::vector<Dfa::State> delta, std::vector<bool> accepting) {
  return Dfa(n, 0, std::move(delta), std::move(accepting));
}

// Tables are listed as {on '0', on '1'} per state, numbered breadth-first.
const std::array<Dfa, 7>& oracles() {
  static const std::array<Dfa, 7> table = {
      // 1*: 0 accept, 1 sink.
      make(2, {1, 0, 1, 1}, {true, false}),
      // (10)*: 0 start, 1 sink, 2 after '1'.
      make(3, {1, 2, 1, 1, 0, 1}, {true, false, false}),
      // 0 free, 1 odd 1-run, 2 odd 0-run after odd 1-run, 3 even 0-run after it, 4 sink.
      make(5, {0, 1, 2, 0, 3, 4, 2, 1, 4, 4}, {true, true, false, true, false}),
      // Trailing zero count 0,1,2; 3 sink.
      make(4, {1, 0, 2, 0, 3, 0, 3, 3}, {true, true, true, false}),
      // Parities (#0,#1): 0 ee, 1 oe, 2 eo, 3 oo.
      make(4, {1, 2, 0, 3, 3, 0, 2, 1}, {true, false, false, false}),
      // (#0 - #1) mod 3.
      make(3, {1, 2, 2, 0, 0, 1}, {true, false, false}),
      // Phase within 0*1*0*1*; 4 sink.
      make(5, {0, 1, 2, 1, 2, 3, 4, 3, 4, 4}, {true, true, true, true, false}),
  };
  return table;
}

}  // namespace

const Dfa& tomita_dfa(GrammarId grammar) {
  return oracles()[static_cast<std::size_t>(grammar.value() - 1)];
}

}  // namespace tomita
