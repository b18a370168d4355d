#include "udd/bounds.hpp"

#include <cmath>
#include <string>

#include "udd/errors.hpp"

namespace udd {

namespace {

void check_delta(double delta, const char* where) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidDelta(std::string(where) + ": confidence level must lie in (0,1), got " +
                           std::to_string(delta));
    }
}

void check_common(const BoundInputs& inp, const char* where) {
    check_delta(inp.delta, where);
    if (inp.k < 1) {
        throw InvalidConfig(std::string(where) + ": context radius must be >= 1, got " +
                            std::to_string(inp.k));
    }
    if (inp.n <= 2 * std::size_t(inp.k)) {
        throw SequenceTooShort(std::string(where) + ": need n > 2k, got n=" +
                               std::to_string(inp.n) + ", k=" + std::to_string(inp.k));
    }
    if (inp.s_size < 1) {
        throw InvalidConfig(std::string(where) + ": mapping-set size must be >= 1, got " +
                            std::to_string(inp.s_size));
    }
    if (!(inp.b_norm > 0.0)) {
        throw InvalidConfig(std::string(where) + ": weight-norm bound must be positive, got " +
                            std::to_string(inp.b_norm));
    }
    if (inp.hidden.empty()) {
        throw InvalidConfig(std::string(where) + ": at least one hidden layer is required");
    }
}

// (2k+1)*sqrt(2*ln(2/delta)/n), the McDiarmid tail common to both theorems.
double tail_term(std::size_t n, int k, double delta) {
    return (2.0 * k + 1.0) * std::sqrt(2.0 * std::log(2.0 / delta) / double(n));
}

}  // namespace

double c_max(const LossTables& tables, const Eigen::MatrixXd& lambda) {
    return tables.l.cwiseAbs().maxCoeff() + lambda.cwiseAbs().maxCoeff();
}

double c_tilde(double b_norm, const std::vector<int>& widths, int s_size) {
    if (!(b_norm > 0.0)) {
        throw InvalidConfig("c_tilde: weight-norm bound must be positive, got " +
                            std::to_string(b_norm));
    }
    if (widths.empty()) {
        throw InvalidConfig("c_tilde: at least one hidden layer is required");
    }
    double width_product = 1.0;
    for (int w : widths) {
        if (w < 1) {
            throw InvalidConfig("c_tilde: layer widths must be positive, got " + std::to_string(w));
        }
        width_product *= double(w);
    }
    const double depth_plus_one = double(widths.size()) + 1.0;
    return std::pow(2.0 * b_norm, depth_plus_one) *
           std::sqrt(width_product * double(s_size) / 2.0);
}

double thm1_rhs(const BoundInputs& inp) {
    check_common(inp, "thm1_rhs");
    const double ct = c_tilde(inp.b_norm, inp.hidden, inp.s_size);
    const double ratio = std::sqrt(double(inp.k) / double(inp.n));
    const double class_term = 4.0 * double(inp.s_size) * std::sqrt(ct * ratio);
    return 2.0 * inp.c_max * (class_term + tail_term(inp.n, inp.k, inp.delta));
}

double thm2_rhs(const BoundInputs& inp) {
    check_common(inp, "thm2_rhs");
    const double gamma = inp.gamma.has_value() ? *inp.gamma : gamma_star(inp);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidGamma("thm2_rhs: gamma must be a finite positive value, got " +
                           std::to_string(gamma));
    }
    const double ct = c_tilde(inp.b_norm, inp.hidden, inp.s_size);
    const double ratio = std::sqrt(double(inp.k) / double(inp.n));
    const double s = double(inp.s_size);
    return inp.c_max *
           (2.0 * gamma * s * s + (2.0 * ct / gamma) * ratio + tail_term(inp.n, inp.k, inp.delta));
}

double gamma_star(const BoundInputs& inp) {
    check_common(inp, "gamma_star");
    const double ct = c_tilde(inp.b_norm, inp.hidden, inp.s_size);
    const double ratio = std::sqrt(double(inp.k) / double(inp.n));
    return std::sqrt(ct * ratio) / double(inp.s_size);
}

double prop3_epsilon(std::size_t n, int k, double delta, int z_size, int s_size,
                     double c_max_val) {
    check_delta(delta, "prop3_epsilon");
    if (k < 0) {
        throw InvalidConfig("prop3_epsilon: context radius must be >= 0, got " +
                            std::to_string(k));
    }
    if (n <= 2 * std::size_t(k)) {
        throw SequenceTooShort("prop3_epsilon: need n > 2k, got n=" + std::to_string(n) +
                               ", k=" + std::to_string(k));
    }
    const double contexts = std::pow(double(z_size), 2.0 * k);
    const double log_sum =
        std::log((k + 1.0) / delta) + contexts * std::log(double(s_size) / delta);
    const double scale = (k + 1.0) * c_max_val * c_max_val / (2.0 * double(n - 2 * std::size_t(k)));
    return std::sqrt(scale * log_sum);
}

double prop3_epsilon(const BoundInputs& inp) {
    return prop3_epsilon(inp.n, inp.k, inp.delta, inp.z_size, inp.s_size, inp.c_max);
}

bool is_vacuous(double value, double c_max_val) {
    return !(value <= c_max_val);
}

}  // namespace udd
