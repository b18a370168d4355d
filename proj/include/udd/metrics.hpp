#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>

#include "udd/channel.hpp"
#include "udd/context.hpp"
#include "udd/types.hpp"

namespace udd {

// One evaluation's loss figures. est_loss averages L(Z_i, m_i); true_loss
// averages lambda(x_i, xhat_i) and needs clean data; regret is their
// difference. boundary_rule and n_eval pin down which positions were scored
// so numbers from different conventions are never mixed.
struct LossReport {
    double est_loss = 0.0;
    std::optional<double> true_loss;
    std::optional<double> regret;
    std::size_t n_eval = 0;
    PadRule boundary_rule = PadRule::ZeroPad;
};

// (1/n) sum_i L(z_centers[i], choices[i]). Throws LengthMismatch on unequal
// spans, EmptyEvaluation on empty ones.
double avg_estimated_loss(std::span<const Symbol> z_centers, std::span<const int> choices,
                          const LossTables& tables);

// (1/n) sum_i lambda(x_i, xhat_i); equals BER under Hamming loss.
double avg_true_loss(std::span<const Symbol> x_seq, std::span<const Symbol> xhat_seq,
                     const Eigen::MatrixXd& lambda);

// true_loss / delta: error rate relative to the channel's raw flip rate.
// Throws ZeroDelta.
double relative_ber(double true_loss, double delta);

LossReport make_report(double est_loss, std::optional<double> true_loss, std::size_t n_eval,
                       PadRule rule);

std::string pad_rule_name(PadRule rule);

}  // namespace udd
