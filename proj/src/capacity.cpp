#include "fapchan/capacity.hpp"

#include <cmath>
#include <stdexcept>

#include "fapchan/entropy.hpp"
#include "fapchan/specfun.hpp"

namespace fapchan::capacity {

namespace {
constexpr double kPi = 3.14159265358979323846;

double entropy_of(double u, double lambda, int d) {
    if (d == 2) return entropy::vdfap_entropy_2d(u, lambda);
    return entropy::entropy_quadrature(channel::VdfapParams(u, lambda, d));
}

void check_d(const CapacityQuery& q, int want = -1) {
    if (want > 0 && q.d != want)
        throw std::invalid_argument("capacity: closed form requires d = 2");
}
} // namespace

CapacityQuery::CapacityQuery(int dim, double drift, double lam, double power)
    : d(dim), u(drift), lambda(lam), P(power) {
    if (d != 1 && d != 2)
        throw std::invalid_argument("CapacityQuery: entropy evaluable only for d in {1, 2}");
    if (!(u < 0.0)) throw std::invalid_argument("CapacityQuery: u must be < 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("CapacityQuery: lambda must be > 0");
    if (!(P > 0.0)) throw std::invalid_argument("CapacityQuery: P must be > 0");
}

double lower_bound_2d(const CapacityQuery& q) {
    check_d(q, 2);
    const double au = -q.u;
    return entropy::h0(au * (q.lambda + au * q.P / 2.0)) - entropy::h0(au * q.lambda);
}

double lower_bound_2d_expanded(const CapacityQuery& q) {
    check_d(q, 2);
    using specfun::expint_ei;
    const double au = -q.u;
    const double s = q.lambda * au;
    const double sp = (q.lambda + q.P * au / 2.0) * au;
    const double e = std::exp(1.0);
    return 2.0 * std::log1p(q.P * au / (2.0 * q.lambda)) -
           std::log1p(q.P * au * au / (2.0 * (1.0 + s))) +
           s * std::exp(s) * (e * expint_ei(-1.0 - s) - 3.0 * expint_ei(-s)) -
           sp * std::exp(sp) * (e * expint_ei(-1.0 - sp) - 3.0 * expint_ei(-sp));
}

double upper_bound_2d(const CapacityQuery& q) {
    check_d(q, 2);
    using specfun::expint_ei;
    const double au = -q.u;
    const double s = q.lambda * au;
    const double e = std::exp(1.0);
    return std::log(q.P / (2.0 * q.lambda * q.lambda) + 1.0 / s) + std::log1p(s) -
           2.0 + s * std::exp(s) * (e * expint_ei(-1.0 - s) - 3.0 * expint_ei(-s));
}

double lower_bound_general(const CapacityQuery& q) {
    check_d(q);
    const double au = -q.u;
    const double lam_max = au * q.P / q.d;
    if (q.d == 2) {
        // h0 is strictly increasing, so the sup sits at the boundary
        return lower_bound_2d(q);
    }
    // d = 1: bounded golden-section maximization over lambda' in (0, lam_max]
    const double h_base = entropy_of(q.u, q.lambda, q.d);
    auto objective = [&](double lp) {
        return entropy_of(q.u, q.lambda + lp, q.d) - h_base;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 1e-9 * lam_max, b = lam_max;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while ((b - a) > 1e-6 * lam_max) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        }
    }
    return std::max(f1, f2);
}

double upper_bound_general(const CapacityQuery& q) {
    check_d(q);
    const double au = -q.u;
    return 0.5 * q.d *
               std::log(2.0 * kPi * std::exp(1.0) * (q.P / q.d + q.lambda / au)) -
           entropy_of(q.u, q.lambda, q.d);
}

CapacityResult bounds(const CapacityQuery& q) {
    if (q.d == 2) return {lower_bound_2d(q), upper_bound_2d(q)};
    return {lower_bound_general(q), upper_bound_general(q)};
}

double to_bits(double nats) { return nats / std::log(2.0); }

std::vector<SweepRow> capacity_sweep(SweepVariable vary, double lo, double hi,
                                     int steps, const CapacityQuery& fixed,
                                     Units units) {
    if (steps < 2) throw std::invalid_argument("capacity_sweep: steps must be >= 2");
    if (!(hi > lo)) throw std::invalid_argument("capacity_sweep: range must be increasing");

    const double step = (hi - lo) / (steps - 1);
    // open intervals like (0, hi] start half a step inside the boundary
    const bool lo_is_boundary =
        (vary != SweepVariable::u && lo <= 0.0) || (vary == SweepVariable::u && lo <= 0.0);
    const double start = lo_is_boundary ? lo + 0.5 * step : lo;

    std::vector<SweepRow> rows;
    rows.reserve(steps);
    for (int i = 0; i < steps; ++i) {
        const double x = (i == 0) ? start : lo + i * step;
        SweepRow row{x, 0.0, 0.0, true};
        try {
            CapacityQuery q = fixed;
            switch (vary) {
                case SweepVariable::P: q = CapacityQuery(fixed.d, fixed.u, fixed.lambda, x); break;
                case SweepVariable::lambda: q = CapacityQuery(fixed.d, fixed.u, x, fixed.P); break;
                case SweepVariable::u: q = CapacityQuery(fixed.d, -x, fixed.lambda, fixed.P); break;
            }
            const CapacityResult r = bounds(q);
            row.lower = units == Units::bits ? to_bits(r.lower) : r.lower;
            row.upper = units == Units::bits ? to_bits(r.upper) : r.upper;
        } catch (const std::exception&) {
            row.valid = false;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace fapchan::capacity
