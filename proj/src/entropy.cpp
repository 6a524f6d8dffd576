#include "fapchan/entropy.hpp"

#include <cmath>
#include <stdexcept>

#include "fapchan/quadrature.hpp"
#include "fapchan/specfun.hpp"

namespace fapchan::entropy {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_s(double s) {
    if (!(s > 0.0)) throw std::domain_error("ancillary function: requires s > 0");
}
} // namespace

double g(double s) {
    check_s(s);
    // s e^{s+1} Ei(-(s+1)) - 3 s e^s Ei(-s), with the exponentials cancelled
    // into the scaled Ei so large s cannot overflow
    using specfun::expint_ei_scaled;
    return s * expint_ei_scaled(-(s + 1.0)) - 3.0 * s * expint_ei_scaled(-s);
}

double h0(double s) {
    check_s(s);
    return 2.0 * std::log(s) - std::log1p(s) - g(s);
}

AncillaryDerivatives h0_derivatives(double s) {
    check_s(s);
    const double gs = g(s);
    return {(s + 1.0) / s * gs + s / (s + 1.0) - 3.0,
            (s + 1.0) / s * (2.0 - gs)};
}

double vdfap_entropy_2d(double u, double lambda) {
    if (!(u < 0.0)) throw std::invalid_argument("vdfap_entropy_2d: u must be < 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("vdfap_entropy_2d: lambda must be > 0");
    const double s = lambda * -u;
    return std::log(2.0 * kPi) + 3.0 + 2.0 * std::log(lambda) - std::log1p(s) - g(s);
}

double entropy_tail_integral(double a) {
    if (!(a > 0.0)) throw std::domain_error("entropy_tail_integral: requires a > 0");
    using specfun::expint_ei;
    const double e = std::exp(1.0);
    const double ema = std::exp(-a);
    return std::sqrt(kPi / 2.0) *
           (e * expint_ei(-1.0 - a) - 3.0 * expint_ei(-a) - ema -
            ema / (2.0 * a) *
                (6.0 * std::log(a) - 2.0 * std::log1p(a) + 6.0 + std::log(2.0 / kPi)));
}

double entropy_quadrature(const VdfapParams& params) {
    if (params.d != 1 && params.d != 2)
        throw std::invalid_argument("entropy_quadrature: d must be 1 or 2");
    const double au = -params.u;
    // f decays like exp(-|u| rho); integrate to where it underflows
    const double r_max = 710.0 / au + 2.0 * params.lambda;
    const double surface = params.d == 1 ? 2.0 : 2.0 * kPi;
    auto integrand = [&](double r) {
        const double f = channel::vdfap_pdf_radial(r, params);
        if (f <= 0.0) return 0.0;
        const double radial = params.d == 1 ? 1.0 : r;
        return radial * f * std::log(f);
    };
    return -surface * quad::integrate(integrand, 0.0, r_max, 1e-8);
}

} // namespace fapchan::entropy
