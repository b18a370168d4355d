#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace udd {

// Base class for all library errors. Subcommands map these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// channel
struct NonStochasticRow : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct SymbolOutOfAlphabet : Error { using Error::Error; };

// mappings
struct SetTooLarge : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };

// context
struct BoundaryViolation : Error { using Error::Error; };

// dude
struct SequenceTooShort : Error { using Error::Error; };
struct ContextCapExceeded : Error { using Error::Error; };

// ndude
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyEvaluation : Error { using Error::Error; };
struct ZeroDelta : Error { using Error::Error; };

// bounds
struct InvalidDelta : Error { using Error::Error; };
struct InvalidGamma : Error { using Error::Error; };

// harness
struct InvalidProbability : Error { using Error::Error; };
struct MissingTrueLoss : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };

struct ParseError : Error {
    std::size_t offset;  // byte offset into the input where parsing failed
    ParseError(const std::string& what, std::size_t off)
        : Error(what + " (byte " + std::to_string(off) + ")"), offset(off) {}
};

}  // namespace udd
