#include "udd/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>

#include "udd/errors.hpp"

namespace udd {

namespace {

std::string read_file_bytes(const std::string& path, const char* who) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(std::string(who) + ": cannot open " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::string& bytes, const char* who) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) {
        throw Error(std::string(who) + ": cannot write " + path);
    }
}

// Cursor over PBM header text: whitespace separates tokens, '#' starts a
// comment running to end of line.
struct PbmCursor {
    const std::string& bytes;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            const char c = bytes[pos];
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
                       c == '\v') {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::size_t read_dim(const char* what) {
        skip_space_and_comments();
        if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9') {
            throw ParseError(std::string("load_image: expected ") + what, pos);
        }
        std::size_t value = 0;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            value = value * 10 + std::size_t(bytes[pos] - '0');
            if (value > 100000) {
                throw ParseError(std::string("load_image: implausible ") + what, pos);
            }
            ++pos;
        }
        return value;
    }
};

SymbolGrid parse_p1(const std::string& bytes, PbmCursor& cur) {
    const std::size_t cols = cur.read_dim("width");
    const std::size_t rows = cur.read_dim("height");
    if (cols == 0 || rows == 0) {
        throw ParseError("load_image: zero image dimension", cur.pos);
    }
    SymbolGrid img;
    img.rows = rows;
    img.cols = cols;
    img.data.reserve(rows * cols);
    // P1 pixels are '0'/'1' characters; whitespace between them is optional.
    while (img.data.size() < rows * cols) {
        cur.skip_space_and_comments();
        if (cur.pos >= bytes.size()) {
            throw ParseError("load_image: truncated P1 pixel data", cur.pos);
        }
        const char c = bytes[cur.pos];
        if (c != '0' && c != '1') {
            throw ParseError("load_image: P1 pixel must be 0 or 1", cur.pos);
        }
        img.data.push_back(Symbol(c - '0'));
        ++cur.pos;
    }
    return img;
}

SymbolGrid parse_p4(const std::string& bytes, PbmCursor& cur) {
    const std::size_t cols = cur.read_dim("width");
    const std::size_t rows = cur.read_dim("height");
    if (cols == 0 || rows == 0) {
        throw ParseError("load_image: zero image dimension", cur.pos);
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (cur.pos >= bytes.size() ||
        !(bytes[cur.pos] == ' ' || bytes[cur.pos] == '\t' || bytes[cur.pos] == '\n' ||
          bytes[cur.pos] == '\r')) {
        throw ParseError("load_image: P4 header must end with whitespace", cur.pos);
    }
    ++cur.pos;

    SymbolGrid img;
    img.rows = rows;
    img.cols = cols;
    img.data.reserve(rows * cols);
    const std::size_t row_bytes = (cols + 7) / 8;
    for (std::size_t r = 0; r < rows; ++r) {
        if (bytes.size() - cur.pos < row_bytes) {
            throw ParseError("load_image: truncated P4 raster", bytes.size());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const unsigned char byte = (unsigned char)(bytes[cur.pos + c / 8]);
            img.data.push_back(Symbol((byte >> (7 - c % 8)) & 1));
        }
        cur.pos += row_bytes;
    }
    return img;
}

}  // namespace

SymbolGrid load_image(const std::string& path) {
    const std::string bytes = read_file_bytes(path, "load_image");
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw ParseError("load_image: not a PBM file (missing P header)", 0);
    }
    const char kind = bytes[1];
    PbmCursor cur{bytes, 2};
    if (kind == '1') {
        return parse_p1(bytes, cur);
    }
    if (kind == '4') {
        return parse_p4(bytes, cur);
    }
    if (kind == '2' || kind == '3' || kind == '5' || kind == '6') {
        throw UnsupportedFormat(std::string("load_image: P") + kind +
                                " is not a bitmap; only P1/P4 PBM is supported");
    }
    throw ParseError("load_image: unknown PNM variant", 1);
}

void save_image_p1(const SymbolGrid& img, const std::string& path) {
    std::string out = "P1\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n";
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            if (c > 0) out += ' ';
            out += char('0' + (img.at(r, c) & 1));
        }
        out += '\n';
    }
    write_file_bytes(path, out, "save_image_p1");
}

void save_image_p4(const SymbolGrid& img, const std::string& path) {
    std::string out = "P4\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n";
    const std::size_t row_bytes = (img.cols + 7) / 8;
    for (std::size_t r = 0; r < img.rows; ++r) {
        std::string row(row_bytes, '\0');
        for (std::size_t c = 0; c < img.cols; ++c) {
            if (img.at(r, c) & 1) {
                row[c / 8] = char((unsigned char)(row[c / 8]) | (1u << (7 - c % 8)));
            }
        }
        out += row;
    }
    write_file_bytes(path, out, "save_image_p4");
}

SequenceFile load_sequence(const std::string& path) {
    const std::string bytes = read_file_bytes(path, "load_sequence");
    if (bytes.size() < 4 || bytes.compare(0, 4, "UDS1") != 0) {
        throw ParseError("load_sequence: bad magic, not a symbol-sequence file", 0);
    }
    if (bytes.size() < 16) {
        throw ParseError("load_sequence: truncated header", bytes.size());
    }
    std::uint32_t alphabet = 0;
    for (int i = 0; i < 4; ++i) {
        alphabet |= std::uint32_t((unsigned char)(bytes[4 + i])) << (8 * i);
    }
    std::uint64_t length = 0;
    for (int i = 0; i < 8; ++i) {
        length |= std::uint64_t((unsigned char)(bytes[8 + i])) << (8 * i);
    }
    if (alphabet < 1 || alphabet > std::uint32_t(kMaxAlphabet)) {
        throw ParseError("load_sequence: alphabet size out of range", 4);
    }
    if (bytes.size() - 16 != length) {
        throw ParseError("load_sequence: length field does not match payload", 8);
    }
    SequenceFile result;
    result.alphabet = int(alphabet);
    result.seq.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
        const unsigned char b = (unsigned char)(bytes[16 + i]);
        if (b >= alphabet) {
            throw ParseError("load_sequence: symbol outside declared alphabet", 16 + i);
        }
        result.seq[i] = Symbol(b);
    }
    return result;
}

void save_sequence(const SymbolSeq& seq, int alphabet, const std::string& path) {
    if (alphabet < 1 || alphabet > kMaxAlphabet) {
        throw InvalidConfig("save_sequence: alphabet size must be in [1, " +
                            std::to_string(kMaxAlphabet) + "], got " + std::to_string(alphabet));
    }
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] >= alphabet) {
            throw SymbolOutOfAlphabet("save_sequence: symbol " + std::to_string(int(seq[i])) +
                                      " at position " + std::to_string(i) +
                                      " outside alphabet of size " + std::to_string(alphabet));
        }
    }
    std::string out = "UDS1";
    for (int i = 0; i < 4; ++i) out += char((std::uint32_t(alphabet) >> (8 * i)) & 0xFF);
    const std::uint64_t length = seq.size();
    for (int i = 0; i < 8; ++i) out += char((length >> (8 * i)) & 0xFF);
    out.append(reinterpret_cast<const char*>(seq.data()), seq.size());
    write_file_bytes(path, out, "save_sequence");
}

SymbolSeq grid_to_sequence(const SymbolGrid& img) {
    return img.data;
}

SymbolGrid sequence_to_grid(const SymbolSeq& seq, std::size_t rows, std::size_t cols) {
    if (seq.size() != rows * cols) {
        throw LengthMismatch("sequence_to_grid: " + std::to_string(seq.size()) +
                             " symbols cannot fill a " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " grid");
    }
    SymbolGrid img;
    img.rows = rows;
    img.cols = cols;
    img.data = seq;
    return img;
}

std::string format_double(double v) {
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

}  // namespace udd
