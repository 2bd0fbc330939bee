#include "hfscreen/labels.hpp"

#include "hfscreen/errors.hpp"

namespace hfscreen {

std::string_view to_string(Coarse c) {
  switch (c) {
    case Coarse::Green: return "green";
    case Coarse::Orange: return "orange";
    case Coarse::Other: return "other";
  }
  return "?";
}

std::string_view to_string(Fine f) {
  switch (f) {
    case Fine::Green: return "green";
    case Fine::Orange: return "orange";
    case Fine::Grey: return "grey";
    case Fine::Red: return "red";
    case Fine::Purple: return "purple";
  }
  return "?";
}

Coarse parse_coarse(std::string_view name) {
  for (Coarse c : kAllCoarse) {
    if (to_string(c) == name) return c;
  }
  throw DataError("unknown coarse label '" + std::string(name) + "'");
}

Fine parse_fine(std::string_view name) {
  for (Fine f : kAllFine) {
    if (to_string(f) == name) return f;
  }
  if (name == "gray") return Fine::Grey;
  throw DataError("unknown color label '" + std::string(name) + "'");
}

}  // namespace hfscreen
