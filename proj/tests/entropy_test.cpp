#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fapchan/entropy.hpp"
#include "fapchan/quadrature.hpp"
#include "fapchan/specfun.hpp"

using namespace fapchan;
using namespace fapchan::entropy;

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

TEST_CASE("ancillary g against frozen references") {
    // frozen from a 40-digit reference evaluation of
    // g(s) = s e^{s+1} Ei(-(s+1)) - 3 s e^s Ei(-s)
    CHECK(g(1.0) == doctest::Approx(1.427713470081360).epsilon(1e-13));
    CHECK(g(0.5) == doctest::Approx(1.160237614079804).epsilon(1e-13));
    CHECK(g(2.0) == doctest::Approx(1.643804220818699).epsilon(1e-13));
    CHECK(g(10.0) == doctest::Approx(1.908482229590183).epsilon(1e-13));
    CHECK(g(100.0) == doctest::Approx(1.990098066789843).epsilon(1e-12));
    CHECK_THROWS_AS(g(0.0), std::domain_error);
    CHECK_THROWS_AS(g(-1.0), std::domain_error);
}

TEST_CASE("g limits and monotonicity") {
    // g -> 0 as s -> 0+, g -> 2 as s -> inf
    CHECK(g(1e-7) == doctest::Approx(4.602629759847668e-6).epsilon(1e-12));
    CHECK(g(1e5) == doctest::Approx(1.999990000099998).epsilon(1e-12));
    double prev = g(1e-3);
    for (int i = 1; i <= 80; ++i) {
        const double s = 1e-3 * std::pow(1e7, i / 80.0);
        const double v = g(s);
        CHECK(v > prev);
        CHECK(v < 2.0);
        prev = v;
    }
}

TEST_CASE("h0 against frozen references") {
    CHECK(h0(1.0) == doctest::Approx(-2.120860650641305).epsilon(1e-13));
    CHECK(h0(1.5) == doctest::Approx(-1.667226772740973).epsilon(1e-13));
    // small-s regime: h0(s) ~ 2 log s, well conditioned
    CHECK(h0(1e-5) == doctest::Approx(-23.02618304133193).epsilon(1e-12));
    CHECK(h0(1e-8) == doctest::Approx(-36.84136202724522).epsilon(1e-12));
    CHECK(h0(1e3) == doctest::Approx(4.907754780642087).epsilon(1e-12));
}

TEST_CASE("h0 is strictly increasing") {
    double prev = h0(1e-6);
    for (int i = 1; i <= 100; ++i) {
        const double s = 1e-6 * std::pow(1e10, i / 100.0);
        const double v = h0(s);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("derivatives against finite differences") {
    for (double s : {0.1, 0.5, 1.0, 3.0, 20.0}) {
        const auto d = h0_derivatives(s);
        const double h = s * 1e-6;
        const double gfd = (g(s + h) - g(s - h)) / (2.0 * h);
        const double hfd = (h0(s + h) - h0(s - h)) / (2.0 * h);
        CHECK(d.g_prime == doctest::Approx(gfd).epsilon(1e-7));
        CHECK(d.h0_prime == doctest::Approx(hfd).epsilon(1e-7));
        CHECK(d.h0_prime > 0.0);
    }
    // closed-form spot values at s = 1
    const auto d1 = h0_derivatives(1.0);
    CHECK(d1.g_prime == doctest::Approx(2.0 * g(1.0) + 0.5 - 3.0).epsilon(1e-13));
    CHECK(d1.h0_prime == doctest::Approx(2.0 * (2.0 - g(1.0))).epsilon(1e-13));
}

TEST_CASE("planar entropy closed form") {
    // frozen references for h = log(2 pi e^3) + 2 log l - log(1 + l|u|) - g(l|u|)
    CHECK(vdfap_entropy_2d(-1.0, 1.0) == doctest::Approx(2.717016415768041).epsilon(1e-13));
    CHECK(vdfap_entropy_2d(-2.0, 1.0) == doctest::Approx(2.095460556922537).epsilon(1e-13));
    CHECK(vdfap_entropy_2d(-0.5, 2.0) == doctest::Approx(4.103310776887931).epsilon(1e-13));

    // identity h = h0(|u| l) + log(2 pi e^3) - 2 log |u|
    for (double u : {-0.3, -1.0, -4.0})
        for (double l : {0.5, 1.0, 7.0}) {
            const double via_h0 =
                h0(-u * l) + std::log(2.0 * kPi) + 3.0 - 2.0 * std::log(-u);
            CHECK(vdfap_entropy_2d(u, l) == doctest::Approx(via_h0).epsilon(1e-12));
        }
    CHECK_THROWS_AS(vdfap_entropy_2d(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(vdfap_entropy_2d(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("entropy scaling laws") {
    // increasing in lambda at fixed u; h(au, l/a) = h(u, l) - 2 log a
    double prev = vdfap_entropy_2d(-1.0, 0.1);
    for (double l = 0.2; l < 30.0; l *= 1.5) {
        const double v = vdfap_entropy_2d(-1.0, l);
        CHECK(v > prev);
        prev = v;
    }
    for (double a : {0.5, 2.0, 3.0})
        CHECK(vdfap_entropy_2d(-a, 1.0 / a) ==
              doctest::Approx(vdfap_entropy_2d(-1.0, 1.0) - 2.0 * std::log(a)).epsilon(1e-12));
}

TEST_CASE("quadrature entropy agrees with the closed form") {
    for (double u : {-0.5, -1.0, -2.0})
        for (double l : {0.5, 1.0, 2.0}) {
            const double hq = entropy_quadrature(channel::VdfapParams(u, l, 2));
            CHECK(hq == doctest::Approx(vdfap_entropy_2d(u, l)).epsilon(1e-7));
        }
    // line case has no closed form here; sanity only: finite and below the
    // variance-matched Gaussian bound (1/2) log(2 pi e sigma^2)
    const channel::VdfapParams p1(-1.0, 1.0, 1);
    const double h1 = entropy_quadrature(p1);
    const double bound = 0.5 * std::log(2.0 * kPi * std::exp(1.0) * 1.0);
    CHECK(std::isfinite(h1));
    CHECK(h1 < bound);
}

TEST_CASE("tail integral closed form") {
    // frozen references for the radial log-tail integral
    CHECK(entropy_tail_integral(1.0) == doctest::Approx(-0.7623066881768315).epsilon(1e-12));
    CHECK(entropy_tail_integral(0.5) == doctest::Approx(0.5639508150599383).epsilon(1e-12));

    // independent check: direct quadrature of
    // int_a^inf K_{3/2}(rho)/rho^{1/2} log(K_{3/2}(rho)/rho^{3/2}) drho
    const auto nu = specfun::BesselOrder(3);
    for (double a : {0.5, 1.0, 2.0}) {
        const double direct = quad::integrate_to_infinity(
            [&](double rho) {
                const double k = specfun::bessel_k(nu, rho);
                if (k <= 0.0) return 0.0;
                return k / std::sqrt(rho) * std::log(k / (rho * std::sqrt(rho)));
            },
            a, 1e-11);
        CHECK(entropy_tail_integral(a) == doctest::Approx(direct).epsilon(1e-8));
    }
}
