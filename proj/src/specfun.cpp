#include "fapchan/specfun.hpp"

#include <cmath>
#include <limits>

namespace fapchan::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series for K_0 and K_1, x in (0, 2]:
//   K_0(x) = -(log(x/2) + gamma) I_0(x) + sum_{k>=1} t^k H_k / (k!)^2
//   K_1(x) = 1/x + log(x/2) I_1(x)
//            - (x/4) sum_{k>=0} [psi(k+1) + psi(k+2)] t^k / (k! (k+1)!)
// with t = x^2/4, H_k the harmonic numbers and psi(k+1) = -gamma + H_k.
void k01_series(double x, double& k0, double& k1) {
    const double t = 0.25 * x * x;

    double i0 = 1.0, s0 = 0.0;
    double term = 1.0, hk = 0.0;
    for (int k = 1; k <= 30; ++k) {
        term *= t / (k * k);
        hk += 1.0 / k;
        i0 += term;
        s0 += term * hk;
    }
    k0 = -(std::log(0.5 * x) + kEulerGamma) * i0 + s0;

    double sum_i1 = 0.0, psum = 0.0;
    double a = 1.0;    // t^k / (k! (k+1)!)
    hk = 0.0;
    for (int k = 0; k <= 30; ++k) {
        if (k > 0) {
            a *= t / (k * (k + 1.0));
            hk += 1.0 / k;
        }
        sum_i1 += a;
        psum += (2.0 * (hk - kEulerGamma) + 1.0 / (k + 1.0)) * a;
    }
    const double i1 = 0.5 * x * sum_i1;
    k1 = 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * psum;
}

// Steed's continued fraction (CF2) for e^x K_0, e^x K_1 at x >= 2; accurate
// to near machine precision.
void k01_cf2_scaled(double x, double& k0, double& k1) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double xi = 1.0 / x;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25; // 1/4 - mu^2 with mu = 0
    double q = a1, c = a1, aa = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 10000; ++i) {
        aa -= 2.0 * (i - 1);
        c = -aa * c / i;
        const double qnew = (q1 - b * q2) / aa;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + aa * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) <= eps) break;
    }
    h = a1 * h;
    const double pref = std::sqrt(kPi / (2.0 * x));
    k0 = pref / s;
    k1 = k0 * (0.5 + x - h) * xi;
}

double recur_up(double km1, double k, double two_nu_start, double x, int steps) {
    // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu, starting at nu = two_nu_start/2
    double nu = 0.5 * two_nu_start;
    for (int i = 0; i < steps; ++i) {
        const double kp1 = km1 + (2.0 * nu / x) * k;
        km1 = k;
        k = kp1;
        nu += 1.0;
    }
    return k;
}

} // namespace

double bessel_k_scaled(BesselOrder order, double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel_k: requires x > 0");

    if (order.is_integer()) {
        double k0, k1;
        if (x < 2.0) {
            k01_series(x, k0, k1);
            const double ex = std::exp(x);
            k0 *= ex;
            k1 *= ex;
        } else {
            k01_cf2_scaled(x, k0, k1);
        }
        const int n = order.twice_order / 2;
        if (n == 0) return k0;
        if (n == 1) return k1;
        return recur_up(k0, k1, 2, x, n - 1);
    }
    const double pref = std::sqrt(kPi / (2.0 * x));
    const double kh = pref;                    // e^x K_{1/2}
    const double k3h = pref * (1.0 + 1.0 / x); // e^x K_{3/2}
    const int m = (order.twice_order - 1) / 2; // nu = m + 1/2
    if (m == 0) return kh;
    if (m == 1) return k3h;
    return recur_up(kh, k3h, 3, x, m - 1);
}

double bessel_k(BesselOrder order, double x, bool* underflow) {
    if (underflow) *underflow = false;
    const double result = bessel_k_scaled(order, x) * std::exp(-x);
    if (result == 0.0 && underflow) *underflow = true; // exp(-x) underflow at large x
    return result;
}

double expint_ei(double x) {
    if (!(x < 0.0)) throw std::domain_error("expint_ei: requires x < 0");
    const double ax = -x;
    if (ax <= 1.0) {
        // Ei(x) = gamma + log|x| + sum_{k>=1} x^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= x / k;
            const double add = term / k;
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
        }
        return kEulerGamma + std::log(ax) + sum;
    }
    return expint_ei_scaled(x) * std::exp(-ax);
}

double expint_ei_scaled(double x) {
    if (!(x < 0.0)) throw std::domain_error("expint_ei_scaled: requires x < 0");
    const double ax = -x;
    if (ax <= 1.0) return expint_ei(x) * std::exp(ax);
    // e^{|x|} Ei(x) = -e^{|x|} E_1(|x|); modified Lentz continued fraction
    // for E_1 with the exponential factor left off.
    constexpr double tiny = 1e-300;
    double b = ax + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16) break;
    }
    return -h;
}

} // namespace fapchan::specfun
