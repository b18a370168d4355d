#include "udd/metrics.hpp"

#include <cmath>

#include "udd/errors.hpp"

namespace udd {

double avg_estimated_loss(std::span<const Symbol> z_centers, std::span<const int> choices,
                          const LossTables& tables) {
    if (z_centers.size() != choices.size()) {
        throw LengthMismatch("avg_estimated_loss: " + std::to_string(z_centers.size()) +
                             " centers vs " + std::to_string(choices.size()) + " choices");
    }
    if (z_centers.empty()) {
        throw EmptyEvaluation("avg_estimated_loss: no positions to evaluate");
    }
    const auto n_mappings = tables.l.cols();
    double total = 0.0;
    for (std::size_t i = 0; i < z_centers.size(); ++i) {
        const Symbol z = z_centers[i];
        const int m = choices[i];
        if (z >= tables.l.rows()) {
            throw SymbolOutOfAlphabet("avg_estimated_loss: symbol " + std::to_string(int(z)) +
                                      " outside noisy alphabet of size " +
                                      std::to_string(tables.l.rows()));
        }
        if (m < 0 || m >= n_mappings) {
            throw IndexOutOfRange("avg_estimated_loss: mapping index " + std::to_string(m) +
                                  " outside [0, " + std::to_string(n_mappings) + ")");
        }
        total += tables.l(z, m);
    }
    return total / double(z_centers.size());
}

double avg_true_loss(std::span<const Symbol> x_seq, std::span<const Symbol> xhat_seq,
                     const Eigen::MatrixXd& lambda) {
    if (x_seq.size() != xhat_seq.size()) {
        throw LengthMismatch("avg_true_loss: " + std::to_string(x_seq.size()) + " clean vs " +
                             std::to_string(xhat_seq.size()) + " reconstructed symbols");
    }
    if (x_seq.empty()) {
        throw EmptyEvaluation("avg_true_loss: no positions to evaluate");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < x_seq.size(); ++i) {
        if (x_seq[i] >= lambda.rows()) {
            throw SymbolOutOfAlphabet("avg_true_loss: clean symbol " +
                                      std::to_string(int(x_seq[i])) + " outside alphabet of size " +
                                      std::to_string(lambda.rows()));
        }
        if (xhat_seq[i] >= lambda.cols()) {
            throw SymbolOutOfAlphabet("avg_true_loss: reconstruction symbol " +
                                      std::to_string(int(xhat_seq[i])) +
                                      " outside alphabet of size " + std::to_string(lambda.cols()));
        }
        total += lambda(x_seq[i], xhat_seq[i]);
    }
    return total / double(x_seq.size());
}

double relative_ber(double true_loss, double delta) {
    if (delta == 0.0) {
        throw ZeroDelta("relative_ber: channel flip rate is zero");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidDelta("relative_ber: flip rate must be a finite positive value, got " +
                           std::to_string(delta));
    }
    return true_loss / delta;
}

LossReport make_report(double est_loss, std::optional<double> true_loss, std::size_t n_eval,
                       PadRule rule) {
    LossReport report;
    report.est_loss = est_loss;
    report.true_loss = true_loss;
    if (true_loss.has_value()) {
        report.regret = est_loss - *true_loss;
    }
    report.n_eval = n_eval;
    report.boundary_rule = rule;
    return report;
}

std::string pad_rule_name(PadRule rule) {
    return rule == PadRule::ZeroPad ? "zero_pad" : "skip_boundary";
}

}  // namespace udd
