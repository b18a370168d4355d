#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "udd/bounds.hpp"
#include "udd/channel.hpp"
#include "udd/errors.hpp"
#include "udd/mappings.hpp"

using namespace udd;

namespace {

BoundInputs reference_point() {
    BoundInputs inp;
    inp.n = 1000000;
    inp.k = 1;
    inp.delta = 0.1;
    inp.b_norm = 1.0;
    inp.hidden = {4};
    inp.s_size = 4;
    inp.z_size = 2;
    inp.c_max = 2.125;
    return inp;
}

}  // namespace

TEST_CASE("c_max adds the largest magnitudes of both loss tables") {
    const Channel ch = bsc_channel(0.1);
    const LossTables t = estimated_loss(ch, enumerate_mappings(2, 2));
    // max |L| = 1.125 over the BSC(0.1) table, max |lambda| = 1 for Hamming.
    CHECK(c_max(t, ch.lambda) == doctest::Approx(2.125).epsilon(1e-12));

    const Channel noisy = bsc_channel(0.4);
    const LossTables t4 = estimated_loss(noisy, enumerate_mappings(2, 2));
    CHECK(c_max(t4, noisy.lambda) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("c_tilde composes the norm bound and layer widths") {
    // One hidden layer of 4, B = 1, |S| = 4:
    // (2*1)^2 * sqrt(4*4/2) = 4*sqrt(8) = 8*sqrt(2).
    CHECK(c_tilde(1.0, {4}, 4) == doctest::Approx(8.0 * std::sqrt(2.0)).epsilon(1e-15));

    // Two hidden layers of 3, B = 0.5, |S| = 4:
    // (2*0.5)^3 * sqrt(3*3*4/2) = sqrt(18).
    CHECK(c_tilde(0.5, {3, 3}, 4) == doctest::Approx(std::sqrt(18.0)).epsilon(1e-15));

    CHECK_THROWS_AS(c_tilde(0.0, {4}, 4), InvalidConfig);
    CHECK_THROWS_AS(c_tilde(1.0, {}, 4), InvalidConfig);
    CHECK_THROWS_AS(c_tilde(1.0, {0}, 4), InvalidConfig);
}

TEST_CASE("frozen reference point for the uniform-deviation bounds") {
    // Every number below was recomputed by hand from the formulas before
    // being frozen here.
    const BoundInputs inp = reference_point();
    CHECK(gamma_star(inp) == doctest::Approx(0.026591479484724945).epsilon(1e-14));
    CHECK(thm1_rhs(inp) == doctest::Approx(7.264091191936365).epsilon(1e-14));
    CHECK(thm2_rhs(inp) == doctest::Approx(3.632045595968182).epsilon(1e-14));
    CHECK(prop3_epsilon(inp) == doctest::Approx(0.008953108343139728).epsilon(1e-14));
}

TEST_CASE("independent re-evaluation of the closed forms") {
    // The same formulas, written out inline from scratch, evaluated on a
    // spread of inputs; guards against transcription slips in the library.
    const std::vector<BoundInputs> points = [] {
        std::vector<BoundInputs> pts;
        for (std::size_t n : {std::size_t(5000), std::size_t(200000)}) {
            for (int k : {1, 4, 16}) {
                for (double b : {0.8, 2.0}) {
                    BoundInputs p = reference_point();
                    p.n = n;
                    p.k = k;
                    p.b_norm = b;
                    p.hidden = {8, 8};
                    pts.push_back(p);
                }
            }
        }
        return pts;
    }();

    for (const BoundInputs& p : points) {
        const double s = p.s_size;
        const double ct = std::pow(2.0 * p.b_norm, double(p.hidden.size()) + 1.0) *
                          std::sqrt(8.0 * 8.0 * s / 2.0);
        const double kn = std::sqrt(double(p.k) / double(p.n));
        const double tail =
            (2.0 * p.k + 1.0) * std::sqrt(2.0 * std::log(2.0 / p.delta) / double(p.n));
        const double t1 = 2.0 * p.c_max * (4.0 * s * std::sqrt(ct * kn) + tail);
        const double gs = std::sqrt(ct * kn) / s;
        const double t2 = p.c_max * (2.0 * gs * s * s + (2.0 * ct / gs) * kn + tail);

        CHECK(c_tilde(p.b_norm, p.hidden, p.s_size) == doctest::Approx(ct).epsilon(1e-12));
        CHECK(thm1_rhs(p) == doctest::Approx(t1).epsilon(1e-12));
        CHECK(gamma_star(p) == doctest::Approx(gs).epsilon(1e-12));
        CHECK(thm2_rhs(p) == doctest::Approx(t2).epsilon(1e-12));
    }
}

TEST_CASE("the optimal gamma halves the first bound") {
    for (std::size_t n : {std::size_t(10000), std::size_t(1000000)}) {
        for (int k : {1, 8, 24}) {
            BoundInputs inp = reference_point();
            inp.n = n;
            inp.k = k;
            CHECK(thm2_rhs(inp) == doctest::Approx(thm1_rhs(inp) / 2.0).epsilon(1e-14));

            // Any other gamma does strictly worse.
            BoundInputs off = inp;
            off.gamma = gamma_star(inp) * 3.0;
            CHECK(thm2_rhs(off) > thm2_rhs(inp));
            off.gamma = gamma_star(inp) / 5.0;
            CHECK(thm2_rhs(off) > thm2_rhs(inp));
        }
    }
}

TEST_CASE("bounds grow with k and shrink with n") {
    BoundInputs inp = reference_point();
    double prev1 = 0.0, prev3 = 0.0;
    for (int k : {1, 2, 4, 8, 16}) {
        inp.k = k;
        const double t1 = thm1_rhs(inp);
        const double p3 = prop3_epsilon(inp);
        CHECK(t1 > prev1);
        CHECK(p3 > prev3);
        prev1 = t1;
        prev3 = p3;
    }

    inp = reference_point();
    double last1 = std::numeric_limits<double>::infinity();
    double last3 = std::numeric_limits<double>::infinity();
    for (std::size_t n : {std::size_t(1000), std::size_t(100000), std::size_t(10000000)}) {
        inp.n = n;
        CHECK(thm1_rhs(inp) < last1);
        CHECK(prop3_epsilon(inp) < last3);
        last1 = thm1_rhs(inp);
        last3 = prop3_epsilon(inp);
    }
}

TEST_CASE("vacuousness compares against c_max") {
    const BoundInputs inp = reference_point();
    // At the reference point the uniform bounds exceed the loss range while
    // the union bound does not.
    CHECK(is_vacuous(thm1_rhs(inp), inp.c_max));
    CHECK(is_vacuous(thm2_rhs(inp), inp.c_max));
    CHECK_FALSE(is_vacuous(prop3_epsilon(inp), inp.c_max));

    CHECK(is_vacuous(std::numeric_limits<double>::quiet_NaN(), 1.0));
    CHECK(is_vacuous(std::numeric_limits<double>::infinity(), 1.0));
    CHECK_FALSE(is_vacuous(1.0, 1.0));  // equal is still informative
}

TEST_CASE("union-bound epsilon overflows gracefully at large k") {
    // z^(2k) overflows double around k = 540 for a binary alphabet; the
    // result becomes +inf and is flagged vacuous instead of crashing.
    const double eps = prop3_epsilon(2000, 600, 0.1, 2, 4, 2.125);
    CHECK(std::isinf(eps));
    CHECK(is_vacuous(eps, 2.125));
}

TEST_CASE("input validation") {
    SUBCASE("confidence level") {
        BoundInputs inp = reference_point();
        inp.delta = 0.0;
        CHECK_THROWS_AS(thm1_rhs(inp), InvalidDelta);
        inp.delta = 1.0;
        CHECK_THROWS_AS(thm1_rhs(inp), InvalidDelta);
        CHECK_THROWS_AS(prop3_epsilon(1000, 1, 0.0, 2, 4, 1.0), InvalidDelta);
    }
    SUBCASE("context radius") {
        BoundInputs inp = reference_point();
        inp.k = 0;
        CHECK_THROWS_AS(thm1_rhs(inp), InvalidConfig);
        CHECK_THROWS_AS(prop3_epsilon(1000, -1, 0.1, 2, 4, 1.0), InvalidConfig);
    }
    SUBCASE("sequence length") {
        BoundInputs inp = reference_point();
        inp.n = 2;
        CHECK_THROWS_AS(thm1_rhs(inp), SequenceTooShort);
        CHECK_THROWS_AS(prop3_epsilon(2, 1, 0.1, 2, 4, 1.0), SequenceTooShort);
    }
    SUBCASE("norm bound and hidden layers") {
        BoundInputs inp = reference_point();
        inp.b_norm = 0.0;
        CHECK_THROWS_AS(thm1_rhs(inp), InvalidConfig);
        inp = reference_point();
        inp.hidden.clear();
        CHECK_THROWS_AS(thm1_rhs(inp), InvalidConfig);
    }
    SUBCASE("explicit gamma") {
        BoundInputs inp = reference_point();
        inp.gamma = 0.0;
        CHECK_THROWS_AS(thm2_rhs(inp), InvalidGamma);
        inp.gamma = -1.0;
        CHECK_THROWS_AS(thm2_rhs(inp), InvalidGamma);
    }
}
