#pragma once

#include <array>

#include "tomita/common.hpp"
#include "tomita/dfa.hpp"

namespace tomita {

/// Minimal canonical DFA for one of the seven Tomita grammars:
///   1  1*
///   2  (10)*
///   3  no odd-length run of 1s is directly followed by an odd-length run of 0s
///   4  no "000" substring
///   5  even number of 0s and even number of 1s
///   6  (#0 - #1) divisible by 3
///   7  0*1*0*1*
const Dfa& tomita_dfa(GrammarId grammar);

inline constexpr std::array<int, 7> kAllGrammars = {1, 2, 3, 4, 5, 6, 7};

}  // namespace tomita
