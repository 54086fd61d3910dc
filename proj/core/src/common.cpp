#include "tomita/common.hpp"

#include <string>

namespace tomita {

std::string_view to_string(Label label) noexcept {
  return label == Label::positive ? "positive" : "negative";
}

Label parse_label(std::string_view text) {
  if (text == "1" || text == "positive") return Label::positive;
  if (text == "0" || text == "negative") return Label::negative;
  throw InputError("unrecognized label '" + std::string(text) + "'");
}

int symbol_index(char symbol) {
  if (symbol == '0') return 0;
  if (symbol == '1') return 1;
  throw InputError(std::string("symbol '") + symbol + "' is not in the alphabet {0,1}");
}

void require_binary(std::string_view text) {
  for (char c : text) symbol_index(c);
}

GrammarId::GrammarId(int id) : id_(id) {
  if (id < 1 || id > 7) {
    throw InputError("grammar id " + std::to_string(id) + " outside 1..7");
  }
}

}  // namespace tomita
