#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomita/common.hpp"

namespace tomita {

/// Complete deterministic finite automaton.
///
/// States are numbered 0..num_states()-1. The alphabet is an ordered list of
/// single-character symbols (always "01" in this project); the transition
/// table is total, so every (state, symbol) pair has exactly one successor.
class Dfa {
 public:
  using State = std::size_t;

  /// `transitions[s * alphabet.size() + a]` is the successor of state `s`
  /// on the a-th symbol. Throws InputError if the table is not total or
  /// references states outside the automaton.
  Dfa(std::size_t num_states, State start, std::vector<State> transitions,
      std::vector<bool> accepting, std::string alphabet = "01");

  std::size_t num_states() const noexcept { return accepting_.size(); }
  State start() const noexcept { return start_; }
  const std::string& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }

  State next(State s, std::size_t symbol) const noexcept {
    return transitions_[s * alphabet_.size() + symbol];
  }
  bool is_accepting(State s) const noexcept { return accepting_[s]; }
  std::vector<State> accepting_states() const;

  /// Index of `c` in the alphabet; InputError when absent.
  std::size_t symbol_of(char c) const;

  State run(std::string_view x) const;
  bool accepts(std::string_view x) const { return accepting_[run(x)]; }
  Label classify(std::string_view x) const {
    return accepts(x) ? Label::positive : Label::negative;
  }

  // Incremental interface shared with RnnModel.
  State initial_state() const noexcept { return start_; }
  State step(State s, int symbol) const noexcept {
    return next(s, static_cast<std::size_t>(symbol));
  }
  Label decide(State s) const noexcept {
    return accepting_[s] ? Label::positive : Label::negative;
  }

  /// Same transitions, accepting set inverted.
  Dfa complement() const;

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  State start_;
  std::vector<State> transitions_;
  std::vector<bool> accepting_;
  std::string alphabet_;
};

/// Language-preserving minimal DFA: unreachable states are dropped, then
/// Hopcroft partition refinement merges equivalent states. States of the
/// result are numbered in breadth-first order from the start state (symbol
/// order), so two minimal DFAs for the same language compare equal.
Dfa minimize(const Dfa& dfa);

struct EquivalenceResult {
  bool equivalent = false;
  /// A shortest string classified differently, when not equivalent.
  std::optional<std::string> counterexample;
};

/// Breadth-first search over the product automaton for a reachable pair
/// with differing acceptance. InputError when the alphabets differ.
EquivalenceResult equivalent(const Dfa& a, const Dfa& b);

/// Plain-text form:
///   states N start S
///   accepting i j k
///   state 0: 0->a 1->b
std::string to_text(const Dfa& dfa);
Dfa dfa_from_text(std::string_view text);

}  // namespace tomita
