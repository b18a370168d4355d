#pragma once

#include <cstdint>
#include <string>

#include "udd/types.hpp"

namespace udd {

// Binary images travel as PBM. Both the ASCII (P1) and packed (P4) variants
// are read; pixel value 1 means black per the PBM convention and maps to
// symbol 1 unchanged. Anything else (P2/P3/P5/P6, arbitrary bytes) is
// rejected. Parse failures carry the byte offset of the offending input.
SymbolGrid load_image(const std::string& path);
void save_image_p1(const SymbolGrid& img, const std::string& path);
void save_image_p4(const SymbolGrid& img, const std::string& path);

// Raw symbol sequences: magic "UDS1", then little-endian u32 alphabet size
// and u64 length, then one byte per symbol. Every symbol must be below the
// alphabet size.
struct SequenceFile {
    SymbolSeq seq;
    int alphabet = 0;
};
SequenceFile load_sequence(const std::string& path);
void save_sequence(const SymbolSeq& seq, int alphabet, const std::string& path);

// Raster-scan (row-major) flattening, the convention for feeding images to
// the 1-D sliding-window denoisers.
SymbolSeq grid_to_sequence(const SymbolGrid& img);
SymbolGrid sequence_to_grid(const SymbolSeq& seq, std::size_t rows, std::size_t cols);

// Shortest round-trip decimal rendering of a double (printf %.17g trimmed
// to the shortest string that parses back exactly).
std::string format_double(double v);

}  // namespace udd
