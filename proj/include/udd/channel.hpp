#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "udd/types.hpp"

namespace udd {

class MappingSet;

// Known discrete memoryless channel plus the per-symbol loss it is scored
// against. `pi` is row-stochastic |X| x |Z| and must have full row rank so
// that the Moore-Penrose pseudoinverse acts as a right inverse.
struct Channel {
    Eigen::MatrixXd pi;      // |X| x |Z| transition probabilities
    Eigen::MatrixXd lambda;  // |X| x |Xhat| loss matrix, entries >= 0
    int x_size = 0;
    int z_size = 0;
    int xhat_size = 0;
};

// Estimated-loss tables derived from a channel and a mapping set.
// l(z,s) unbiasedly estimates the true loss of applying mapping s when the
// noisy symbol is z; l_new = -l + l_max (elementwise) is the non-negative
// pseudo-label matrix used as the training target.
struct LossTables {
    Eigen::MatrixXd l;      // |Z| x |S|
    Eigen::MatrixXd l_new;  // |Z| x |S|, min entry is exactly 0
    double l_max = 0.0;     // max entry of l
};

// Validates shapes, row-stochasticity (1e-9 tolerance), entry ranges, and
// full row rank (smallest singular value > 1e-10).
// Throws NonStochasticRow or RankDeficient.
Channel build_channel(const Eigen::MatrixXd& pi, const Eigen::MatrixXd& lambda);

// Binary symmetric channel with crossover probability delta, Hamming loss.
Channel bsc_channel(double delta);

// Hamming loss matrix of the given size.
Eigen::MatrixXd hamming_loss(int size);

// pi^T (pi pi^T)^{-1}. The |X| x |X| Gram matrix is inverted with
// partial-pivot Gauss-Jordan elimination. Throws RankDeficient when a pivot
// collapses. Postcondition: pi * result == identity within 1e-10.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& pi);

// rho(x,s) = sum_z pi(x,z) * lambda(x, s(z)), the expected true loss of
// mapping s given clean symbol x.
Eigen::MatrixXd rho(const Channel& ch, const MappingSet& s_set);

// L = pi^dagger * rho, plus the derived l_new and l_max.
LossTables estimated_loss(const Channel& ch, const MappingSet& s_set);

// Passes x_seq through the channel. Each output symbol is drawn from the
// input symbol's pi row using an Rng seeded with `seed` (see rng.hpp for the
// exact draw definition), so results are bit-identical for equal inputs.
SymbolSeq corrupt(const SymbolSeq& x_seq, const Channel& ch, std::uint64_t seed);

// Line-oriented channel file:
//   x_size <n>, z_size <n>, xhat_size <n>, pi i j v, lambda i j v
// Blank lines and lines starting with '#' are skipped.
Channel load_channel_file(const std::string& path);
void save_channel_file(const Channel& ch, const std::string& path);

}  // namespace udd
