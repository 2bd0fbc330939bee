#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hfscreen {

// Class indices are ordered rarest first; ties in any argmax resolve toward
// the lower index.
enum class Coarse : std::uint8_t { Green = 0, Orange = 1, Other = 2 };
enum class Fine : std::uint8_t { Green, Orange, Grey, Red, Purple };

inline constexpr int kNumCoarse = 3;
inline constexpr int kNumFine = 5;
inline constexpr std::array<Coarse, kNumCoarse> kAllCoarse{Coarse::Green, Coarse::Orange,
                                                           Coarse::Other};
inline constexpr std::array<Fine, kNumFine> kAllFine{Fine::Green, Fine::Orange, Fine::Grey,
                                                     Fine::Red, Fine::Purple};

constexpr int index(Coarse c) { return static_cast<int>(c); }
constexpr int index(Fine f) { return static_cast<int>(f); }

constexpr Coarse coarse_of(Fine f) {
  switch (f) {
    case Fine::Green: return Coarse::Green;
    case Fine::Orange: return Coarse::Orange;
    default: return Coarse::Other;
  }
}

/// Gold or predicted color. `fine`, when present, always agrees with `coarse`.
class ColorLabel {
 public:
  explicit ColorLabel(Coarse coarse) : coarse_(coarse) {}
  explicit ColorLabel(Fine fine) : coarse_(coarse_of(fine)), fine_(fine) {}

  Coarse coarse() const { return coarse_; }
  std::optional<Fine> fine() const { return fine_; }

  friend bool operator==(const ColorLabel&, const ColorLabel&) = default;

 private:
  Coarse coarse_;
  std::optional<Fine> fine_;
};

std::string_view to_string(Coarse c);
std::string_view to_string(Fine f);

// Lowercase names ("green", "grey", ...). Throw DataError on unknown names.
Coarse parse_coarse(std::string_view name);
Fine parse_fine(std::string_view name);

}  // namespace hfscreen
