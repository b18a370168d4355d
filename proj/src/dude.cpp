#include "udd/dude.hpp"

#include "udd/errors.hpp"

namespace udd {

namespace {

// Smallest index attaining the minimum.
int argmin(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[i] < v[best]) best = i;
    }
    return best;
}

}  // namespace

std::string context_key(const std::vector<int>& ctx) {
    std::string key(ctx.size(), '\0');
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        key[i] = ctx[i] == kPad ? static_cast<char>(0xFF) : static_cast<char>(ctx[i]);
    }
    return key;
}

ContextStats accumulate(const SymbolSeq& z_seq, int k, const LossTables& tables, PadRule pad,
                        std::size_t context_cap) {
    const std::size_t n = z_seq.size();
    if (pad == PadRule::SkipBoundary && n <= 2 * static_cast<std::size_t>(k)) {
        throw SequenceTooShort("need n > 2k, have n = " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (z_seq[i] >= tables.l.rows()) {
            throw SymbolOutOfAlphabet("symbol " + std::to_string(int(z_seq[i])) +
                                      " at position " + std::to_string(i) +
                                      " outside the loss table's alphabet of size " +
                                      std::to_string(tables.l.rows()));
        }
    }
    const int s_count = static_cast<int>(tables.l.cols());
    ContextStats stats;
    stats.k = k;
    stats.pad = pad;

    const std::size_t begin = pad == PadRule::SkipBoundary ? static_cast<std::size_t>(k) : 0;
    const std::size_t end = pad == PadRule::SkipBoundary ? n - k : n;
    for (std::size_t i = begin; i < end; ++i) {
        const std::string key = context_key(extract_1d(z_seq, i, k, pad));
        auto [it, inserted] = stats.acc.try_emplace(key);
        if (inserted) {
            if (stats.acc.size() > context_cap) {
                throw ContextCapExceeded("distinct contexts exceed cap " +
                                         std::to_string(context_cap));
            }
            it->second.assign(s_count, 0.0);
        }
        const Symbol z = z_seq[i];
        for (int m = 0; m < s_count; ++m) {
            it->second[m] += tables.l(z, m);
        }
        ++stats.positions;
    }
    return stats;
}

std::unordered_map<std::string, int> dude_rule(const ContextStats& stats) {
    std::unordered_map<std::string, int> rule;
    rule.reserve(stats.acc.size());
    for (const auto& [key, vec] : stats.acc) {
        rule.emplace(key, argmin(vec));
    }
    return rule;
}

SymbolSeq dude_denoise(const SymbolSeq& z_seq, int k, PadRule pad, const MappingSet& s_set,
                       const LossTables& tables) {
    const ContextStats stats = accumulate(z_seq, k, tables, pad);
    const auto rule = dude_rule(stats);

    const std::size_t n = z_seq.size();
    SymbolSeq out(n);
    const std::size_t begin = pad == PadRule::SkipBoundary ? static_cast<std::size_t>(k) : 0;
    const std::size_t end = pad == PadRule::SkipBoundary ? n - k : n;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < begin || i >= end) {
            out[i] = z_seq[i];
            continue;
        }
        const int m = rule.at(context_key(extract_1d(z_seq, i, k, pad)));
        out[i] = s_set.apply(m, z_seq[i]);
    }
    return out;
}

SymbolSeq dude_denoise(const SymbolSeq& z_seq, int k, const Channel& ch, PadRule pad) {
    const MappingSet s_set = enumerate_mappings(ch.z_size, ch.xhat_size);
    const LossTables tables = estimated_loss(ch, s_set);
    return dude_denoise(z_seq, k, pad, s_set, tables);
}

std::vector<int> dude_choices(const SymbolSeq& z_seq, int k, PadRule pad,
                              const LossTables& tables) {
    const ContextStats stats = accumulate(z_seq, k, tables, pad);
    const auto rule = dude_rule(stats);

    const std::size_t n = z_seq.size();
    const std::size_t begin = pad == PadRule::SkipBoundary ? static_cast<std::size_t>(k) : 0;
    const std::size_t end = pad == PadRule::SkipBoundary ? n - k : n;
    std::vector<int> choices;
    choices.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        choices.push_back(rule.at(context_key(extract_1d(z_seq, i, k, pad))));
    }
    return choices;
}

}  // namespace udd
