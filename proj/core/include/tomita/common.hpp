#pragma once

#include <cstddef>
#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tomita {

/// Binary classification outcome. The numeric value doubles as the class
/// index in score vectors (0 = negative, 1 = positive).
enum class Label : std::uint8_t { negative = 0, positive = 1 };

constexpr Label flip(Label label) noexcept {
  return label == Label::positive ? Label::negative : Label::positive;
}

constexpr std::size_t index_of(Label label) noexcept {
  return static_cast<std::size_t>(label);
}

std::string_view to_string(Label label) noexcept;

/// Accepts "1"/"0" and "positive"/"negative".
Label parse_label(std::string_view text);

/// Raised when a caller hands an operation arguments outside its contract.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Filesystem and parse failures on persisted artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symbols are the characters '0' and '1'; their index is the digit value.
int symbol_index(char symbol);

/// Throws InputError unless every character is '0' or '1'.
void require_binary(std::string_view text);

/// Tomita grammar number, always in 1..7.
class GrammarId {
 public:
  explicit GrammarId(int id);

  int value() const noexcept { return id_; }

  friend auto operator<=>(const GrammarId&, const GrammarId&) = default;

 private:
  int id_;
};

/// Inclusive range of string lengths.
struct LengthRange {
  std::size_t min = 0;
  std::size_t max = 0;

  bool contains(std::size_t n) const noexcept { return n >= min && n <= max; }
  friend bool operator==(const LengthRange&, const LengthRange&) = default;
};

}  // namespace tomita
