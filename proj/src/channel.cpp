#include "fapchan/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fapchan/specfun.hpp"

namespace fapchan::channel {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroDriftSwitch = 1e-8;

void check_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite value");
}
} // namespace

PlanarChannelParams::PlanarChannelParams(int dim, std::vector<double> drift, double lam)
    : d(dim), u(std::move(drift)), lambda(lam) {
    if (d < 1) throw std::invalid_argument("PlanarChannelParams: d must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("PlanarChannelParams: lambda must be > 0");
    if (static_cast<int>(u.size()) != d + 1)
        throw std::invalid_argument("PlanarChannelParams: drift must have d+1 components");
    check_finite(u, "PlanarChannelParams drift");
}

double PlanarChannelParams::u_parallel_norm() const {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += u[i] * u[i];
    return std::sqrt(s);
}

double PlanarChannelParams::u_norm() const {
    double s = 0.0;
    for (double c : u) s += c * c;
    return std::sqrt(s);
}

VdfapParams::VdfapParams(double drift, double lam, int dim)
    : u(drift), lambda(lam), d(dim) {
    if (d < 1) throw std::invalid_argument("VdfapParams: d must be >= 1");
    if (!(u < 0.0)) throw std::invalid_argument("VdfapParams: u must be < 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("VdfapParams: lambda must be > 0");
}

PlanarChannelParams VdfapParams::as_planar() const {
    std::vector<double> vec(d + 1, 0.0);
    vec[d] = u;
    return PlanarChannelParams(d, std::move(vec), lambda);
}

SphereQuery::SphereQuery(double radius, double dist, double th, double ph,
                         double th0, double ph0)
    : R(radius), r(dist), theta(th), phi(ph), theta0(th0), phi0(ph0) {
    if (!(R > 0.0)) throw std::invalid_argument("SphereQuery: R must be > 0");
    if (!(r > R)) throw std::domain_error("SphereQuery: source must satisfy r > R");
}

double cauchy_pdf(std::span<const double> n, double lambda, int d) {
    if (d < 1) throw std::invalid_argument("cauchy_pdf: d must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("cauchy_pdf: lambda must be > 0");
    if (static_cast<int>(n.size()) != d)
        throw std::invalid_argument("cauchy_pdf: point has wrong dimension");
    check_finite(n, "cauchy_pdf point");
    double n2 = 0.0;
    for (double c : n) n2 += c * c;
    const double nu = 0.5 * (d + 1);
    return std::tgamma(nu) / std::pow(kPi, nu) * lambda /
           std::pow(n2 + lambda * lambda, nu);
}

double fap_pdf_plane(std::span<const double> n, const PlanarChannelParams& params) {
    if (static_cast<int>(n.size()) != params.d)
        throw std::invalid_argument("fap_pdf_plane: point has wrong dimension");
    check_finite(n, "fap_pdf_plane point");

    const int d = params.d;
    const double lambda = params.lambda;
    double n2 = 0.0, tilt = -params.u_vertical() * lambda;
    for (int i = 0; i < d; ++i) {
        n2 += n[i] * n[i];
        tilt += params.u[i] * n[i];
    }
    const double rho = std::sqrt(n2 + lambda * lambda);
    const double unorm = params.u_norm();
    const double arg = unorm * rho;

    if (arg < kZeroDriftSwitch) {
        // small-argument limit of K_nu; the tilt factor is within 1e-8 of 1
        // here but kept for continuity across the switch
        return std::exp(tilt) * cauchy_pdf(n, lambda, d);
    }

    const double half = 0.5 * (d + 1);
    // fold exp(-arg) of K into the tilt exponent to avoid overflow/underflow
    const double kscaled = specfun::bessel_k_scaled(specfun::BesselOrder(d + 1), arg);
    const double log_pref = std::log(2.0 * lambda) + half * std::log(unorm) -
                            half * std::log(2.0 * kPi) - half * std::log(rho);
    return std::exp(log_pref + tilt - arg) * kscaled;
}

double fap_pdf_line_physical(double xi, double x1, double v2, double D_coef,
                             double lambda) {
    if (!(D_coef > 0.0)) throw std::invalid_argument("fap_pdf_line_physical: D_coef must be > 0");
    const double u2 = v2 / (2.0 * D_coef); // sigma^2 = 2 D
    PlanarChannelParams p(1, {0.0, u2}, lambda);
    const double n[1] = {xi - x1};
    return fap_pdf_plane(n, p);
}

double vdfap_pdf(std::span<const double> n, const VdfapParams& params) {
    return fap_pdf_plane(n, params.as_planar());
}

double vdfap_pdf_radial(double r, const VdfapParams& params) {
    std::vector<double> n(params.d, 0.0);
    n[0] = r;
    return vdfap_pdf(n, params);
}

double sphere_angular_density(const SphereQuery& q, bool normalized) {
    const double kappa = std::cos(q.theta) * std::cos(q.theta0) +
                         std::sin(q.theta) * std::sin(q.theta0) *
                             std::cos(q.phi - q.phi0);
    const double r2 = q.r * q.r, R2 = q.R * q.R;
    const double denom = r2 - 2.0 * q.r * q.R * kappa + R2;
    double val = q.R / (4.0 * kPi) * (r2 - R2) / (denom * std::sqrt(denom));
    if (normalized) val /= q.R / q.r; // divide out the hitting probability
    return val;
}

double absorption_mass(const PlanarChannelParams& params) {
    const double ud = params.u_vertical();
    return std::exp(-2.0 * std::max(ud, 0.0) * params.lambda);
}

} // namespace fapchan::channel
