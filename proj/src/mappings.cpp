#include "udd/mappings.hpp"

#include <cmath>

#include "udd/errors.hpp"

namespace udd {

Symbol MappingSet::apply(int m, Symbol z) const {
    if (m < 0 || m >= size() || z >= z_size_) {
        throw IndexOutOfRange("mapping " + std::to_string(m) + ", symbol " + std::to_string(z));
    }
    return table_[static_cast<std::size_t>(m) * z_size_ + z];
}

int MappingSet::index_of(const std::vector<Symbol>& row) const {
    if (static_cast<int>(row.size()) != z_size_) {
        throw IndexOutOfRange("row length " + std::to_string(row.size()));
    }
    // Digits are base xhat_size, least significant at z = 0.
    std::uint64_t m = 0;
    for (int z = z_size_ - 1; z >= 0; --z) {
        if (row[z] >= xhat_size_) throw IndexOutOfRange("symbol out of output alphabet");
        m = m * xhat_size_ + row[z];
    }
    return static_cast<int>(m);
}

MappingSet enumerate_mappings(int z_size, int xhat_size, std::uint64_t cap) {
    if (z_size < 1 || xhat_size < 1) {
        throw IndexOutOfRange("alphabet sizes must be positive");
    }
    std::uint64_t count = 1;
    for (int z = 0; z < z_size; ++z) {
        if (count > cap / xhat_size + 1) {
            throw SetTooLarge("|S| = " + std::to_string(xhat_size) + "^" +
                              std::to_string(z_size) + " exceeds cap " + std::to_string(cap));
        }
        count *= xhat_size;
    }
    if (count > cap) {
        throw SetTooLarge("|S| = " + std::to_string(count) + " exceeds cap " +
                          std::to_string(cap));
    }
    std::vector<Symbol> table(count * z_size);
    for (std::uint64_t m = 0; m < count; ++m) {
        std::uint64_t rest = m;
        for (int z = 0; z < z_size; ++z) {
            table[m * z_size + z] = static_cast<Symbol>(rest % xhat_size);
            rest /= xhat_size;
        }
    }
    return MappingSet(z_size, xhat_size, std::move(table));
}

double per_symbol_regret(Symbol x, Symbol z, int m, const MappingSet& s_set,
                         const LossTables& tables, const Eigen::MatrixXd& lambda) {
    if (z >= tables.l.rows() || x >= lambda.rows()) {
        throw IndexOutOfRange("regret indices out of range");
    }
    return tables.l(z, m) - lambda(x, s_set.apply(m, z));
}

PrunedMappings prune_dominated(const MappingSet& s_set, const LossTables& tables) {
    const int s_count = s_set.size();
    const int z_size = s_set.z_size();
    std::vector<int> kept;
    for (int m = 0; m < s_count; ++m) {
        bool dominated = false;
        for (int other = 0; other < s_count && !dominated; ++other) {
            if (other == m) continue;
            bool leq_all = true, lt_some = false;
            for (int z = 0; z < z_size; ++z) {
                if (tables.l(z, other) > tables.l(z, m)) leq_all = false;
                if (tables.l(z, other) < tables.l(z, m)) lt_some = true;
            }
            // Exact duplicate columns: keep only the smallest index.
            dominated = (leq_all && lt_some) || (leq_all && !lt_some && other < m);
        }
        if (!dominated) kept.push_back(m);
    }

    std::vector<Symbol> table;
    table.reserve(kept.size() * z_size);
    for (int m : kept) {
        for (int z = 0; z < z_size; ++z) {
            table.push_back(s_set.apply(m, static_cast<Symbol>(z)));
        }
    }
    PrunedMappings out{MappingSet(z_size, s_set.xhat_size(), std::move(table)), LossTables{},
                       std::move(kept)};
    out.tables.l.resize(tables.l.rows(), static_cast<Eigen::Index>(out.kept.size()));
    for (std::size_t c = 0; c < out.kept.size(); ++c) {
        out.tables.l.col(static_cast<Eigen::Index>(c)) = tables.l.col(out.kept[c]);
    }
    out.tables.l_max = out.tables.l.maxCoeff();
    out.tables.l_new = (-out.tables.l).array() + out.tables.l_max;
    return out;
}

}  // namespace udd
