#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "udd/channel.hpp"

namespace udd {

// Inputs to the concentration-bound formulas. n is the sequence length, k
// the context radius, delta the confidence level, B the per-node
// incoming-weight norm bound (configured or the measured post-training
// maximum), hidden the layer widths of the network class, s_size/z_size the
// mapping-set and noisy-alphabet sizes, and c_max the loss-range constant.
// gamma is Theorem-2's free parameter; leave it unset to evaluate at the
// optimizing value.
struct BoundInputs {
    std::size_t n = 0;
    int k = 0;
    double delta = 0.0;
    std::optional<double> gamma;
    double b_norm = 0.0;
    std::vector<int> hidden;
    int s_size = 0;
    int z_size = 0;
    double c_max = 0.0;
};

// max |L(z,s)| + max |Lambda(x,xhat)|: the range constant every bound scales
// with.
double c_max(const LossTables& tables, const Eigen::MatrixXd& lambda);

// (2B)^(L+1) * sqrt((prod of widths) * s_size / 2), the network-class
// complexity constant. L is widths.size().
double c_tilde(double b_norm, const std::vector<int>& widths, int s_size);

// 2*c_max*(4*|S|*sqrt(c_tilde*sqrt(k/n)) + (2k+1)*sqrt(2*ln(2/delta)/n)).
// Natural logarithm throughout.
double thm1_rhs(const BoundInputs& inp);

// c_max*(2*gamma*|S|^2 + (2*c_tilde/gamma)*sqrt(k/n)
//        + (2k+1)*sqrt(2*ln(2/delta)/n)),
// evaluated at inp.gamma, or at gamma_star(inp) when gamma is unset.
double thm2_rhs(const BoundInputs& inp);

// sqrt(c_tilde*sqrt(k/n)) / |S|: the gamma minimizing thm2_rhs. At this
// value thm2_rhs equals exactly half of thm1_rhs.
double gamma_star(const BoundInputs& inp);

// sqrt( ((k+1)*c_max^2 / (2*(n-2k))) *
//       (ln((k+1)/delta) + z_size^(2k)*ln(s_size/delta)) ).
// The z_size^(2k) factor is computed in floating point; overflow propagates
// to +inf, which is_vacuous reports.
double prop3_epsilon(std::size_t n, int k, double delta, int z_size, int s_size, double c_max_val);
double prop3_epsilon(const BoundInputs& inp);

// A bound larger than c_max says nothing (the loss can never exceed c_max).
// NaN and +inf count as vacuous.
bool is_vacuous(double value, double c_max_val);

}  // namespace udd
