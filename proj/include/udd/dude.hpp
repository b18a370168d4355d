#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "udd/channel.hpp"
#include "udd/context.hpp"
#include "udd/mappings.hpp"
#include "udd/types.hpp"

namespace udd {

// Per-context accumulated estimated-loss vectors: stats[c][m] is the sum of
// L(Z_i, m) over the positions whose double-sided context equals c. Keys are
// the raw symbol tuples as byte strings (0xFF marks a padded slot).
struct ContextStats {
    std::unordered_map<std::string, std::vector<double>> acc;
    std::size_t positions = 0;
    int k = 0;
    PadRule pad = PadRule::ZeroPad;
};

std::string context_key(const std::vector<int>& ctx);

// One pass over z_seq adding each position's L row to its context vector.
// SkipBoundary evaluates positions [k, n-k) and needs n > 2k. Throws
// ContextCapExceeded past `context_cap` distinct contexts (default 2^24).
ContextStats accumulate(const SymbolSeq& z_seq, int k, const LossTables& tables, PadRule pad,
                        std::size_t context_cap = std::size_t{1} << 24);

// Per context, the smallest mapping index attaining the minimum accumulated
// estimated loss.
std::unordered_map<std::string, int> dude_rule(const ContextStats& stats);

// The k-th order DUDE: x_hat_i = s_{m(C_i)}(Z_i) with m from dude_rule.
// Under SkipBoundary the k boundary positions on each side copy Z_i.
SymbolSeq dude_denoise(const SymbolSeq& z_seq, int k, PadRule pad, const MappingSet& s_set,
                       const LossTables& tables);

// Convenience overload that builds the canonical mapping set and tables.
SymbolSeq dude_denoise(const SymbolSeq& z_seq, int k, const Channel& ch, PadRule pad);

// Mapping index chosen at each evaluated position (same order as the
// positions [eval_begin, eval_end)); used for estimated-loss reporting.
std::vector<int> dude_choices(const SymbolSeq& z_seq, int k, PadRule pad,
                              const LossTables& tables);

}  // namespace udd
