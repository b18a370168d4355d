#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "udd/channel.hpp"
#include "udd/types.hpp"

namespace udd {

// The set S of single-symbol denoisers z -> xhat, enumerated canonically:
// mapping m sends z to digit z of m written in base xhat_size with the
// least-significant digit at z = 0. Row order is strictly increasing in m,
// which fixes every argmin/argmax tie downstream (smallest index wins).
class MappingSet {
public:
    MappingSet(int z_size, int xhat_size, std::vector<Symbol> table)
        : z_size_(z_size), xhat_size_(xhat_size), table_(std::move(table)) {}

    int z_size() const { return z_size_; }
    int xhat_size() const { return xhat_size_; }
    int size() const { return static_cast<int>(table_.size()) / z_size_; }

    Symbol apply(int m, Symbol z) const;

    // Canonical index of the mapping whose row equals `row` (inverse of
    // enumeration).
    int index_of(const std::vector<Symbol>& row) const;

private:
    int z_size_;
    int xhat_size_;
    std::vector<Symbol> table_;  // size() x z_size, row-major
};

// Enumerates all xhat_size^z_size mappings. Throws SetTooLarge when the
// count exceeds `cap`.
MappingSet enumerate_mappings(int z_size, int xhat_size, std::uint64_t cap = 65536);

// r_{(x,z)}[s_m] = L(z, m) - lambda(x, s_m(z)). Its exact expectation over
// Z given x is zero for every (x, m) by the unbiasedness of L.
double per_symbol_regret(Symbol x, Symbol z, int m, const MappingSet& s_set,
                         const LossTables& tables, const Eigen::MatrixXd& lambda);

// Mapping set with dominated members removed: mapping m is dropped when some
// other mapping's L column is <= pointwise and < somewhere. Tied duplicate
// columns keep the smaller index. `kept` receives the surviving original
// indices; the returned tables are rebuilt on the surviving columns.
struct PrunedMappings {
    MappingSet set;
    LossTables tables;
    std::vector<int> kept;  // original mapping index per surviving row
};
PrunedMappings prune_dominated(const MappingSet& s_set, const LossTables& tables);

}  // namespace udd
