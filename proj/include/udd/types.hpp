#pragma once

#include <cstdint>
#include <vector>

namespace udd {

// Alphabet symbols are small non-negative integers. The raw-sequence file
// format stores one byte per symbol, so alphabet sizes are capped at 255
// (0xFF is reserved as the context padding marker in hashed context keys).
using Symbol = std::uint8_t;
using SymbolSeq = std::vector<Symbol>;

inline constexpr int kMaxAlphabet = 255;

// Context tuples use int entries so the padding marker fits alongside symbols.
inline constexpr int kPad = -1;

// Row-major binary image / symbol grid.
struct SymbolGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    SymbolSeq data;  // rows*cols entries, raster order

    Symbol at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    Symbol& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
};

}  // namespace udd
