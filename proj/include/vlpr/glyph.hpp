#pragma once

#include <stdexcept>

#include "vlpr/image.hpp"

namespace vlpr {

inline constexpr int kGlyphRows = 30;
inline constexpr int kGlyphCols = 15;

class EmptyGlyph : public std::runtime_error {
 public:
  EmptyGlyph() : std::runtime_error("glyph has no foreground pixels") {}
};

/// A character normalized to 30 rows by 15 columns.
struct CharacterGlyph {
  BinaryImage bits{kGlyphCols, kGlyphRows};
  int index = 0;       // left-to-right position on the plate
  Rect source_box;     // in plate coordinates
};

inline CharacterGlyph make_glyph(BinaryImage bits) {
  if (bits.width() != kGlyphCols || bits.height() != kGlyphRows)
    throw std::invalid_argument("glyph must be 15 columns by 30 rows");
  CharacterGlyph g;
  g.bits = std::move(bits);
  g.source_box = g.bits.bounds();
  return g;
}

}  // namespace vlpr
