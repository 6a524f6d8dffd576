#pragma once

#include <stdexcept>

// Self-contained special-function kernel: modified Bessel functions of the
// second kind for integer and half-integer order, and the exponential
// integral Ei on the negative axis. No external math dependency.

namespace fapchan::specfun {

// Order nu = twice_order / 2, so twice_order = 0,1,2,... covers
// nu = 0, 1/2, 1, 3/2, 2, 5/2, ...
struct BesselOrder {
    int twice_order;

    explicit BesselOrder(int two_nu) : twice_order(two_nu) {
        if (two_nu < 0) throw std::domain_error("BesselOrder: negative order");
    }
    static BesselOrder integer(int n) { return BesselOrder(2 * n); }
    static BesselOrder half_integer(int numerator) { return BesselOrder(numerator); }
    bool is_integer() const { return twice_order % 2 == 0; }
    double value() const { return 0.5 * twice_order; }
};

// K_nu(x) for x > 0. Half-integer orders use the elementary closed forms
// K_{1/2}(x) = sqrt(pi/(2x)) e^{-x} and
// K_{3/2}(x) = sqrt(pi/2) e^{-x} (1+x) / x^{3/2},
// integer orders a series / continued-fraction split; higher orders via the
// upward recurrence K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu.
// Throws std::domain_error for x <= 0. When the value underflows to zero the
// optional flag is set and 0 is returned.
double bessel_k(BesselOrder order, double x, bool* underflow = nullptr);

// e^x K_nu(x); free of the exp(-x) underflow, used when the caller folds the
// exponential into a larger exponent.
double bessel_k_scaled(BesselOrder order, double x);

// Ei(x) for x < 0: convergent series for |x| <= 1, continued fraction of
// E_1(-x) otherwise. Relative error <= 1e-12. Throws for x >= 0.
double expint_ei(double x);

// e^{|x|} Ei(x) for x < 0; avoids the underflow of Ei itself when the caller
// cancels the exponential analytically.
double expint_ei_scaled(double x);

} // namespace fapchan::specfun
