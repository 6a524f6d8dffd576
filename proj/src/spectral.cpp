#include "fapchan/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace fapchan::spectral {

namespace {
double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

void check_dim(std::span<const double> omega, const VdfapParams& params) {
    if (static_cast<int>(omega.size()) != params.d)
        throw std::invalid_argument("vdfap_cf: frequency point has wrong dimension");
}
} // namespace

double vdfap_cf(std::span<const double> omega, const VdfapParams& params) {
    check_dim(omega, params);
    const double au = -params.u;
    const double s = std::sqrt(norm2(omega) + au * au);
    return std::exp(-params.lambda * (s - au));
}

std::vector<double> vdfap_cf_gradient(std::span<const double> omega,
                                      const VdfapParams& params) {
    check_dim(omega, params);
    const double au = -params.u;
    const double s = std::sqrt(norm2(omega) + au * au);
    const double phi = std::exp(-params.lambda * (s - au));
    const double scale = -params.lambda * phi / s;
    std::vector<double> g(omega.size());
    for (size_t i = 0; i < omega.size(); ++i) g[i] = scale * omega[i];
    return g;
}

std::vector<double> vdfap_cf_hessian(std::span<const double> omega,
                                     const VdfapParams& params) {
    check_dim(omega, params);
    const int d = params.d;
    const double au = -params.u;
    const double s2 = norm2(omega) + au * au;
    const double s = std::sqrt(s2);
    const double phi = std::exp(-params.lambda * (s - au));
    const double diag = -params.lambda * phi / s;
    const double outer = params.lambda * phi * (1.0 + params.lambda * s) / (s2 * s);
    std::vector<double> h(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j)
            h[static_cast<size_t>(i) * d + j] = outer * omega[i] * omega[j];
        h[static_cast<size_t>(i) * d + i] += diag;
    }
    return h;
}

MomentSummary vdfap_moments(const VdfapParams& params) {
    const int d = params.d;
    MomentSummary m;
    m.mean.assign(d, 0.0);
    m.correlation.assign(static_cast<size_t>(d) * d, 0.0);
    const double var = params.lambda / -params.u;
    for (int i = 0; i < d; ++i) m.correlation[static_cast<size_t>(i) * d + i] = var;
    m.second_moment = var * d;
    return m;
}

VdfapParams convolve_params(const VdfapParams& a, const VdfapParams& b) {
    if (a.u != b.u || a.d != b.d)
        throw std::invalid_argument(
            "convolve_params: closure requires identical normalized drift and dimension");
    return VdfapParams(a.u, a.lambda + b.lambda, a.d);
}

} // namespace fapchan::spectral
