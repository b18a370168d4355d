#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "udd/types.hpp"

namespace udd {

enum class PadRule { ZeroPad, SkipBoundary };

// Context geometry: a double-sided 1-D window of k symbols per side, or an
// odd l x l patch with the center cell omitted. One-hot encoding gives the
// input dimension 2k*|Z| (1-D) or (l^2-1)*|Z| (2-D); padding positions
// encode to all-zero blocks so the dimension stays fixed.
struct ContextSpec {
    enum class Kind { OneD, TwoD };
    Kind kind = Kind::OneD;
    int k = 0;  // OneD: symbols per side
    int l = 0;  // TwoD: patch side, odd, >= 3
    int z_size = 2;
    PadRule pad = PadRule::ZeroPad;

    static ContextSpec one_d(int k, int z_size, PadRule pad);
    static ContextSpec two_d(int l, int z_size);  // 2-D always zero-pads

    int window_len() const { return kind == Kind::OneD ? 2 * k : l * l - 1; }
    int encoded_dim() const { return window_len() * z_size; }
};

struct EncodedContext {
    Eigen::VectorXd vec;
    std::size_t center_index = 0;
};

// The 2k symbols around position i, outside-sequence positions as kPad under
// ZeroPad. Under SkipBoundary throws BoundaryViolation unless k <= i < n-k.
std::vector<int> extract_1d(const SymbolSeq& z_seq, std::size_t i, int k, PadRule pad);

// Row-major traversal of the l x l patch centered at (r,c), center omitted,
// out-of-grid cells as kPad.
std::vector<int> extract_2d(const SymbolGrid& img, std::size_t r, std::size_t c, int l);

// Concatenated one-hot blocks; kPad becomes an all-zero block.
EncodedContext one_hot(const std::vector<int>& ctx, int z_size, std::size_t center_index = 0);

// Uniform view over the context positions of a sequence or an image, so the
// sliding-window denoisers can iterate datasets of either shape. Images use
// raster order for position indices.
class ContextSource {
public:
    ContextSource(SymbolSeq seq, ContextSpec spec);       // 1-D
    ContextSource(SymbolGrid grid, ContextSpec spec);     // 2-D

    std::size_t size() const { return z_.size(); }
    Symbol center(std::size_t i) const { return z_[i]; }
    const SymbolSeq& symbols() const { return z_; }
    const ContextSpec& spec() const { return spec_; }

    std::vector<int> context_at(std::size_t i) const;

    // Writes the one-hot encoding of context i into `row` (a matrix row or
    // a contiguous vector; the inner stride is free so both bind).
    using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;
    void encode_into(std::size_t i, RowRef row) const;

    // Position range evaluated under the spec's pad rule: [k, n-k) for 1-D
    // SkipBoundary, everything otherwise. Throws SequenceTooShort when empty.
    std::size_t eval_begin() const;
    std::size_t eval_end() const;

private:
    SymbolSeq z_;
    std::size_t rows_ = 1;
    std::size_t cols_ = 0;
    ContextSpec spec_;
};

}  // namespace udd
