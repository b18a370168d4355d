#include "udd/context.hpp"

#include "udd/errors.hpp"

namespace udd {

ContextSpec ContextSpec::one_d(int k, int z_size, PadRule pad) {
    if (k < 0) throw InvalidConfig("1-D context needs k >= 0");
    if (z_size < 1) throw InvalidConfig("z_size must be positive");
    return ContextSpec{Kind::OneD, k, 0, z_size, pad};
}

ContextSpec ContextSpec::two_d(int l, int z_size) {
    if (l < 3 || l % 2 == 0) throw InvalidConfig("2-D context needs odd l >= 3");
    if (z_size < 1) throw InvalidConfig("z_size must be positive");
    return ContextSpec{Kind::TwoD, 0, l, z_size, PadRule::ZeroPad};
}

std::vector<int> extract_1d(const SymbolSeq& z_seq, std::size_t i, int k, PadRule pad) {
    const std::size_t n = z_seq.size();
    if (i >= n) throw IndexOutOfRange("position " + std::to_string(i));
    if (pad == PadRule::SkipBoundary &&
        (i < static_cast<std::size_t>(k) || i + static_cast<std::size_t>(k) >= n)) {
        throw BoundaryViolation("position " + std::to_string(i) + " within k of the boundary");
    }
    std::vector<int> ctx(2 * static_cast<std::size_t>(k));
    for (int d = 0; d < k; ++d) {
        const std::ptrdiff_t left = static_cast<std::ptrdiff_t>(i) - k + d;
        ctx[d] = left < 0 ? kPad : z_seq[left];
        const std::size_t right = i + 1 + d;
        ctx[k + d] = right >= n ? kPad : z_seq[right];
    }
    return ctx;
}

std::vector<int> extract_2d(const SymbolGrid& img, std::size_t r, std::size_t c, int l) {
    if (r >= img.rows || c >= img.cols) throw IndexOutOfRange("pixel out of grid");
    if (l < 3 || l % 2 == 0) throw InvalidConfig("patch side must be odd, >= 3");
    const int half = l / 2;
    std::vector<int> ctx;
    ctx.reserve(static_cast<std::size_t>(l) * l - 1);
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) + dr;
            const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c) + dc;
            const bool inside = rr >= 0 && cc >= 0 && rr < static_cast<std::ptrdiff_t>(img.rows) &&
                                cc < static_cast<std::ptrdiff_t>(img.cols);
            ctx.push_back(inside ? static_cast<int>(img.at(rr, cc)) : kPad);
        }
    }
    return ctx;
}

EncodedContext one_hot(const std::vector<int>& ctx, int z_size, std::size_t center_index) {
    EncodedContext enc;
    enc.center_index = center_index;
    enc.vec = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ctx.size()) * z_size);
    for (std::size_t p = 0; p < ctx.size(); ++p) {
        const int sym = ctx[p];
        if (sym == kPad) continue;
        if (sym < 0 || sym >= z_size) {
            throw SymbolOutOfAlphabet("context symbol " + std::to_string(sym));
        }
        enc.vec(static_cast<Eigen::Index>(p) * z_size + sym) = 1.0;
    }
    return enc;
}

namespace {

void check_symbols(const SymbolSeq& z, int z_size) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] >= z_size) {
            throw SymbolOutOfAlphabet("symbol " + std::to_string(int(z[i])) + " at position " +
                                      std::to_string(i) + " outside alphabet of size " +
                                      std::to_string(z_size));
        }
    }
}

}  // namespace

ContextSource::ContextSource(SymbolSeq seq, ContextSpec spec)
    : z_(std::move(seq)), rows_(1), cols_(z_.size()), spec_(spec) {
    if (spec_.kind != ContextSpec::Kind::OneD) {
        throw InvalidConfig("sequence data requires a 1-D context spec");
    }
    check_symbols(z_, spec_.z_size);
}

ContextSource::ContextSource(SymbolGrid grid, ContextSpec spec)
    : z_(std::move(grid.data)), rows_(grid.rows), cols_(grid.cols), spec_(spec) {
    if (spec_.kind != ContextSpec::Kind::TwoD) {
        throw InvalidConfig("grid data requires a 2-D context spec");
    }
    if (rows_ * cols_ != z_.size()) throw DimensionMismatch("grid shape mismatch");
    check_symbols(z_, spec_.z_size);
}

std::vector<int> ContextSource::context_at(std::size_t i) const {
    if (spec_.kind == ContextSpec::Kind::OneD) {
        return extract_1d(z_, i, spec_.k, spec_.pad);
    }
    const int l = spec_.l;
    const int half = l / 2;
    const std::ptrdiff_t r0 = static_cast<std::ptrdiff_t>(i / cols_);
    const std::ptrdiff_t c0 = static_cast<std::ptrdiff_t>(i % cols_);
    std::vector<int> ctx;
    ctx.reserve(static_cast<std::size_t>(l) * l - 1);
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const std::ptrdiff_t rr = r0 + dr;
            const std::ptrdiff_t cc = c0 + dc;
            const bool inside = rr >= 0 && cc >= 0 && rr < static_cast<std::ptrdiff_t>(rows_) &&
                                cc < static_cast<std::ptrdiff_t>(cols_);
            ctx.push_back(inside ? static_cast<int>(z_[rr * cols_ + cc]) : kPad);
        }
    }
    return ctx;
}

void ContextSource::encode_into(std::size_t i, RowRef row) const {
    row.setZero();
    const int zs = spec_.z_size;
    if (spec_.kind == ContextSpec::Kind::OneD) {
        const int k = spec_.k;
        const std::size_t n = z_.size();
        for (int d = 0; d < k; ++d) {
            const std::ptrdiff_t left = static_cast<std::ptrdiff_t>(i) - k + d;
            if (left >= 0) row(d * zs + z_[left]) = 1.0;
            const std::size_t right = i + 1 + d;
            if (right < n) row((k + d) * zs + z_[right]) = 1.0;
        }
        return;
    }
    const int l = spec_.l;
    const int half = l / 2;
    const std::ptrdiff_t r0 = static_cast<std::ptrdiff_t>(i / cols_);
    const std::ptrdiff_t c0 = static_cast<std::ptrdiff_t>(i % cols_);
    int pos = 0;
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const std::ptrdiff_t rr = r0 + dr;
            const std::ptrdiff_t cc = c0 + dc;
            if (rr >= 0 && cc >= 0 && rr < static_cast<std::ptrdiff_t>(rows_) &&
                cc < static_cast<std::ptrdiff_t>(cols_)) {
                row(pos * zs + z_[rr * cols_ + cc]) = 1.0;
            }
            ++pos;
        }
    }
}

std::size_t ContextSource::eval_begin() const {
    if (spec_.kind == ContextSpec::Kind::OneD && spec_.pad == PadRule::SkipBoundary) {
        if (z_.size() <= 2 * static_cast<std::size_t>(spec_.k)) {
            throw SequenceTooShort("need n > 2k under SkipBoundary");
        }
        return static_cast<std::size_t>(spec_.k);
    }
    return 0;
}

std::size_t ContextSource::eval_end() const {
    if (spec_.kind == ContextSpec::Kind::OneD && spec_.pad == PadRule::SkipBoundary) {
        if (z_.size() <= 2 * static_cast<std::size_t>(spec_.k)) {
            throw SequenceTooShort("need n > 2k under SkipBoundary");
        }
        return z_.size() - spec_.k;
    }
    return z_.size();
}

}  // namespace udd
