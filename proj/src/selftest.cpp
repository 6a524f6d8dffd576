#include "fapchan/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "fapchan/capacity.hpp"
#include "fapchan/channel.hpp"
#include "fapchan/entropy.hpp"
#include "fapchan/mcsim.hpp"
#include "fapchan/quadrature.hpp"
#include "fapchan/specfun.hpp"
#include "fapchan/spectral.hpp"
#include "fapchan/validate.hpp"

namespace fapchan::selftest {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

// ---- criterion 1: special functions ----------------------------------------

void c1_special_functions(Check& c) {
    using namespace specfun;
    for (int i = 0; i <= 200; ++i) {
        const double x = std::pow(10.0, -4.0 + 6.0 * i / 200.0);
        const double want = std::sqrt(kPi / 2.0) * std::exp(-x) * (1.0 + x) / (x * std::sqrt(x));
        const double got = bessel_k(BesselOrder(3), x);
        c.require(std::fabs(got - want) <= 1e-14 * want, "K_{3/2} closed form");
    }
    // series oracle for Ei at -1 and -2
    for (double x : {-1.0, -2.0}) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k <= 200; ++k) {
            term *= x / k;
            sum += term / k;
        }
        const double oracle = 0.57721566490153286061 + std::log(-x) + sum;
        c.require(std::fabs(expint_ei(x) - oracle) <= 1e-12, "Ei series oracle");
    }
}

// ---- criterion 2: density normalization ------------------------------------

double mass_by_quadrature(const channel::PlanarChannelParams& p) {
    if (p.d == 1) {
        auto half = [&](double sign) {
            return quad::integrate_to_infinity(
                [&](double x) {
                    const double n[1] = {sign * x};
                    return channel::fap_pdf_plane(n, p);
                },
                0.0, 1e-9);
        };
        return half(1.0) + half(-1.0);
    }
    return quad::integrate(
        [&](double th) {
            const double cth = std::cos(th), sth = std::sin(th);
            return quad::integrate_to_infinity(
                [&](double r) {
                    const double n[2] = {r * cth, r * sth};
                    return r * channel::fap_pdf_plane(n, p);
                },
                0.0, 1e-9);
        },
        0.0, 2.0 * kPi, 1e-7);
}

void c2_normalization(Check& c) {
    for (int d : {1, 2})
        for (double unorm : {0.0, 0.5, 1.0, 3.0})
            for (double lambda : {0.25, 1.0, 4.0}) {
                std::vector<double> u = d == 1 ? std::vector<double>{0.6, -0.8}
                                               : std::vector<double>{0.36, 0.48, -0.8};
                for (double& comp : u) comp *= unorm;
                const channel::PlanarChannelParams p(d, u, lambda);
                const double mass = mass_by_quadrature(p);
                c.require(std::fabs(mass - channel::absorption_mass(p)) <= 1e-4,
                          "normalization d=" + std::to_string(d));
            }
    // defective case: drift pointing away from the receiver, mass e^{-2 lambda}
    for (double lambda : {0.25, 1.0, 4.0}) {
        const channel::PlanarChannelParams p(2, {0.0, 0.0, 1.0}, lambda);
        const double mass = mass_by_quadrature(p);
        c.require(std::fabs(mass - std::exp(-2.0 * lambda)) <= 1e-4, "defective mass");
    }
}

// ---- criterion 3: formula consistency --------------------------------------

void c3_consistency(Check& c) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    std::uniform_real_distribution<double> L(0.2, 4.0);
    for (int i = 0; i < 1000; ++i) {
        // d = 1 explicit form
        const channel::PlanarChannelParams p1(1, {U(rng), U(rng)}, L(rng));
        const double n1[1] = {U(rng)};
        const double unorm1 = p1.u_norm();
        const double rho = std::sqrt(n1[0] * n1[0] + p1.lambda * p1.lambda);
        const double want1 =
            unorm1 * p1.lambda / kPi * std::exp(p1.u[0] * n1[0] - p1.u[1] * p1.lambda) *
            specfun::bessel_k(specfun::BesselOrder::integer(1), unorm1 * rho) / rho;
        c.require(std::fabs(channel::fap_pdf_plane(n1, p1) - want1) <= 1e-12 * want1,
                  "d=1 explicit form");

        // d = 2 explicit form
        const channel::PlanarChannelParams p2(2, {U(rng), U(rng), U(rng)}, L(rng));
        const double n2[2] = {U(rng), U(rng)};
        const double unorm2 = p2.u_norm();
        const double r =
            std::sqrt(n2[0] * n2[0] + n2[1] * n2[1] + p2.lambda * p2.lambda);
        const double want2 = p2.lambda / (2.0 * kPi) *
                             std::exp(p2.u[0] * n2[0] + p2.u[1] * n2[1] -
                                      p2.u[2] * p2.lambda - unorm2 * r) *
                             (1.0 + unorm2 * r) / (r * r * r);
        c.require(std::fabs(channel::fap_pdf_plane(n2, p2) - want2) <= 1e-12 * want2,
                  "d=2 explicit form");
    }
    const double z[2] = {0.0, 0.0};
    c.require(std::fabs(channel::vdfap_pdf(z, channel::VdfapParams(-1.0, 1.0, 2)) -
                        1.0 / kPi) <= 1e-12,
              "peak value 1/pi");
}

// ---- criterion 4: characteristic function ----------------------------------

double cf_by_quadrature(const std::vector<double>& omega, const channel::VdfapParams& p) {
    const double R = 12.0 * std::sqrt(p.lambda / -p.u);
    if (p.d == 1) {
        return quad::integrate(
            [&](double x) {
                const double n[1] = {x};
                return channel::vdfap_pdf(n, p) * std::cos(omega[0] * x);
            },
            -R, R, 1e-8);
    }
    return quad::integrate(
        [&](double x) {
            return quad::integrate(
                [&](double y) {
                    const double n[2] = {x, y};
                    return channel::vdfap_pdf(n, p) * std::cos(omega[0] * x + omega[1] * y);
                },
                -R, R, 1e-8);
        },
        -R, R, 1e-7);
}

void c4_characteristic_function(Check& c) {
    const channel::VdfapParams base(-1.0, 1.0, 2);
    const double z[2] = {0.0, 0.0};
    c.require(spectral::vdfap_cf(z, base) == 1.0, "phi(0) = 1 exactly");

    struct Combo { int d; double u, lambda; std::vector<double> omega; };
    const Combo combos[] = {
        {1, -1.0, 1.0, {1.0}},
        {1, -0.5, 2.0, {0.7}},
        {1, -2.0, 0.5, {2.0}},
        {2, -1.0, 1.0, {0.5, 0.0}},
        {2, -1.0, 2.0, {1.0, 1.0}},
        {2, -0.5, 1.0, {0.3, -0.6}},
    };
    for (const Combo& k : combos) {
        const channel::VdfapParams p(k.u, k.lambda, k.d);
        const double direct = cf_by_quadrature(k.omega, p);
        c.require(std::fabs(direct - spectral::vdfap_cf(k.omega, p)) <= 1e-3,
                  "Fourier integral of the pdf");
    }

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    const double h = 1e-6, h2 = 1e-4;
    for (int i = 0; i < 20; ++i) {
        const channel::VdfapParams p(-0.5 - std::fabs(U(rng)), 0.5 + std::fabs(U(rng)), 2);
        const double w[2] = {U(rng), U(rng)};
        const auto grad = spectral::vdfap_cf_gradient(w, p);
        const auto hess = spectral::vdfap_cf_hessian(w, p);
        for (int j = 0; j < 2; ++j) {
            double wp[2] = {w[0], w[1]}, wm[2] = {w[0], w[1]};
            wp[j] += h;
            wm[j] -= h;
            const double fd =
                (spectral::vdfap_cf(wp, p) - spectral::vdfap_cf(wm, p)) / (2.0 * h);
            c.require(std::fabs(grad[j] - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)),
                      "gradient finite differences");
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double wpp[2] = {w[0], w[1]}, wpm[2] = {w[0], w[1]};
                double wmp[2] = {w[0], w[1]}, wmm[2] = {w[0], w[1]};
                wpp[a] += h2; wpp[b] += h2;
                wpm[a] += h2; wpm[b] -= h2;
                wmp[a] -= h2; wmp[b] += h2;
                wmm[a] -= h2; wmm[b] -= h2;
                const double fd =
                    (spectral::vdfap_cf(wpp, p) - spectral::vdfap_cf(wpm, p) -
                     spectral::vdfap_cf(wmp, p) + spectral::vdfap_cf(wmm, p)) /
                    (4.0 * h2 * h2);
                c.require(std::fabs(hess[a * 2 + b] - fd) <=
                              1e-5 * std::max(1.0, std::fabs(fd)),
                          "hessian finite differences");
            }
    }
}

// ---- criterion 5: moments --------------------------------------------------

void c5_moments(Check& c) {
    struct Case { double u, lambda; int d; };
    for (const Case k : {Case{-1.0, 1.0, 2}, Case{-2.0, 3.0, 1}, Case{-0.5, 0.5, 2}}) {
        const channel::VdfapParams p(k.u, k.lambda, k.d);
        const double target = k.lambda * k.d / -k.u;
        const double surface = k.d == 1 ? 2.0 : 2.0 * kPi;
        const double got = quad::integrate_to_infinity(
            [&](double r) {
                const double radial = k.d == 1 ? 1.0 : r;
                return surface * radial * r * r * channel::vdfap_pdf_radial(r, p);
            },
            0.0, 1e-9);
        c.require(std::fabs(got - target) <= 1e-3 * target, "quadrature second moment");
    }

    const channel::VdfapParams p(-1.0, 1.0, 2);
    const auto s = mcsim::sample_vdfap_exact(p, 100000, 2024);
    double mean_r2 = 0.0;
    for (std::uint64_t i = 0; i < s.absorbed; ++i) {
        const auto q = s.sample(i);
        mean_r2 += q[0] * q[0] + q[1] * q[1];
    }
    const double n = static_cast<double>(s.absorbed);
    mean_r2 /= n;
    double var = 0.0;
    for (std::uint64_t i = 0; i < s.absorbed; ++i) {
        const auto q = s.sample(i);
        const double dev = q[0] * q[0] + q[1] * q[1] - mean_r2;
        var += dev * dev;
    }
    const double se = std::sqrt(var / (n - 1.0)) / std::sqrt(n);
    c.require(std::fabs(mean_r2 - 2.0) <= 3.0 * se, "sampler second moment within 3 SE");
}

// ---- criterion 6: entropy --------------------------------------------------

void c6_entropy(Check& c) {
    for (double lambda : {0.25, 1.0, 4.0}) {
        const double closed = entropy::vdfap_entropy_2d(-1.0, lambda);
        const double numeric = entropy::entropy_quadrature(channel::VdfapParams(-1.0, lambda, 2));
        c.require(std::fabs(closed - numeric) <= 1e-4, "entropy quadrature agreement");
    }
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.1, 4.0);
    for (int i = 0; i < 20; ++i) {
        const double u = -U(rng), lambda = U(rng);
        const double via_h0 = entropy::h0(-u * lambda) + std::log(2.0 * kPi) + 3.0 -
                              2.0 * std::log(-u);
        c.require(std::fabs(entropy::vdfap_entropy_2d(u, lambda) - via_h0) <= 1e-12,
                  "h0 identity residual");
    }
    const auto nu = specfun::BesselOrder(3);
    for (double a : {0.5, 1.0, 2.0}) {
        const double direct = quad::integrate_to_infinity(
            [&](double rho) {
                const double k = specfun::bessel_k(nu, rho);
                if (k <= 0.0) return 0.0;
                return k / std::sqrt(rho) * std::log(k / (rho * std::sqrt(rho)));
            },
            a, 1e-11);
        c.require(std::fabs(entropy::entropy_tail_integral(a) - direct) <= 1e-8,
                  "tail integral closed form");
    }
}

// ---- criterion 7: ancillary derivatives and bounds -------------------------

void c7_ancillary(Check& c) {
    for (int i = 0; i <= 300; ++i) {
        const double s = std::pow(10.0, -3.0 + 6.0 * i / 300.0);
        const auto d = entropy::h0_derivatives(s);
        const double bound = (2.0 * s + 3.0) / (s + 2.0);
        c.require(d.h0_prime > 0.0, "h0' > 0");
        c.require(entropy::g(s) < bound, "g below rational bound");
        c.require(bound < 2.0, "rational bound below 2");
    }
    for (double s : {0.1, 0.5, 1.0, 3.0, 20.0}) {
        const auto d = entropy::h0_derivatives(s);
        const double h = s * 1e-6;
        const double gfd = (entropy::g(s + h) - entropy::g(s - h)) / (2.0 * h);
        const double hfd = (entropy::h0(s + h) - entropy::h0(s - h)) / (2.0 * h);
        c.require(std::fabs(d.g_prime - gfd) <= 1e-6 * std::max(1.0, std::fabs(gfd)),
                  "g' finite differences");
        c.require(std::fabs(d.h0_prime - hfd) <= 1e-6 * std::max(1.0, std::fabs(hfd)),
                  "h0' finite differences");
    }
}

// ---- criterion 8: capacity bounds ------------------------------------------

void c8_capacity(Check& c) {
    using namespace capacity;
    const CapacityQuery q(2, -1.0, 1.0, 1.0);
    const double lo1 = to_bits(lower_bound_2d(q));
    const double lo2 = to_bits(lower_bound_2d_expanded(q));
    const double up1 = to_bits(upper_bound_2d(q));
    const double up2 = to_bits(upper_bound_general(q));
    c.require(std::fabs(lo1 - 0.6545) <= 1e-3 && std::fabs(lo2 - 0.6545) <= 1e-3,
              "lower bound reference value");
    c.require(std::fabs(up1 - 0.7593) <= 1e-3 && std::fabs(up2 - 0.7593) <= 1e-3,
              "upper bound reference value");

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> Du(0.1, 3.0), Dl(0.1, 5.0), Dp(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const CapacityQuery r(2, -Du(rng), Dl(rng), Dp(rng));
        const CapacityResult b = bounds(r);
        c.require(b.lower > 0.0 && b.lower <= b.upper, "bound ordering on random queries");
    }

    auto max_gap = [&](SweepVariable v, double lo, double hi, const CapacityQuery& fixed) {
        double g = 0.0;
        for (const auto& row : capacity_sweep(v, lo, hi, 50, fixed, Units::bits))
            if (row.valid) g = std::max(g, row.upper - row.lower);
        return g;
    };
    c.require(max_gap(SweepVariable::P, 0.0, 10.0, q) <= 0.25, "P sweep gap");
    c.require(max_gap(SweepVariable::lambda, 0.0, 10.0, q) <= 0.55, "lambda sweep gap");
    c.require(max_gap(SweepVariable::u, 0.5, 10.0, q) <= 0.35, "drift sweep gap");

    c.require(to_bits(upper_bound_2d(CapacityQuery(2, -1e-3, 1.0, 1.0))) > 5.0,
              "vanishing-drift divergence");
}

// ---- criterion 9: particle verification ------------------------------------

void c9_particles(Check& c) {
    mcsim::SimConfig cfg;
    cfg.ambient_dim = 3;
    cfg.D_coef = 840.0;
    cfg.dt = 1e-5;
    cfg.lambda = 1.0;
    cfg.M = 100000;
    cfg.seed = 90;
    // trajectories still alive after 1e6 steps (10 s of diffusion) would land
    // a hundred microns out, far off the comparison grid; capping them trades
    // 0.6% of far-tail mass for a 3x faster zero-drift run
    cfg.max_steps = 1000000;

    const std::vector<mcsim::GridAxis> axes = {{-3.0, 3.0, 60}, {-3.0, 3.0, 60}};

    cfg.drift = {0.0, 0.0, 0.0};
    const auto zero = mcsim::simulate_fap(cfg);
    const auto zgrid = mcsim::build_histogram(zero, axes, mcsim::GridNormalization::density);
    const auto zrep = validate::compare_density(
        zgrid, channel::PlanarChannelParams(2, cfg.drift, cfg.lambda));
    c.require(zrep.pass, "zero-drift grid agreement");

    cfg.drift = {2.0, -3.0, -1.0};
    const auto skew = mcsim::simulate_fap(cfg);
    const auto sgrid = mcsim::build_histogram(skew, axes, mcsim::GridNormalization::density);
    const auto srep = validate::compare_density(
        sgrid, channel::PlanarChannelParams(2, cfg.drift, cfg.lambda));
    c.require(srep.pass, "drift grid agreement");

    size_t peak = 0;
    for (size_t i = 1; i < sgrid.values.size(); ++i)
        if (sgrid.values[i] > sgrid.values[peak]) peak = i;
    const auto center = sgrid.cell_center(peak);
    c.require(2.0 * center[0] - 3.0 * center[1] > 0.0, "mode displaced along the drift");
}

// ---- criterion 10: weak stability ------------------------------------------

void c10_stability(Check& c) {
    int pass_count = 0, fail_count = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        if (validate::weak_stability_test(-1.0, 1.0, 2.0, 2, 20000, seed).pass)
            ++pass_count;

        // mismatched drift: the sum is not in the family at any parameters.
        // The true radial KS distance here is 0.0095, below the 1% critical
        // value at 2e4 samples, so the fault check runs at 2e5 where the
        // critical value (0.0036) sits well under the distance.
        const std::uint64_t M = 200000;
        auto s1 = mcsim::sample_vdfap_exact(channel::VdfapParams(-1.0, 1.0, 2), M,
                                            seed * 1000 + 1);
        const auto s2 = mcsim::sample_vdfap_exact(channel::VdfapParams(-2.0, 2.0, 2),
                                                  M, seed * 1000 + 2);
        for (size_t i = 0; i < s1.flat.size(); ++i) s1.flat[i] += s2.flat[i];
        if (!validate::ks_radial_report(s1, channel::VdfapParams(-1.5, 3.0, 2)).pass)
            ++fail_count;
    }
    c.require(pass_count >= 9, "matched case passes across seeds");
    c.require(fail_count >= 9, "mismatched-drift case fails across seeds");
}

// ---- criterion 11: CLI determinism -----------------------------------------

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void c11_determinism(Check& c, const std::string& cli) {
    const std::string dir = "/tmp";
    auto run = [&](int threads, const std::string& args, const std::string& out) {
        const std::string cmd = "FAPSIM_THREADS=" + std::to_string(threads) + " \"" + cli +
                                "\" " + args + " --out " + out;
        return std::system(cmd.c_str()) == 0;
    };

    const std::string sim_args =
        "simulate --ambient-dim 3 --u 2,-3,-1 --dt 1e-4 --lambda 1 --M 5000 --seed 7";
    const std::string sweep_args =
        "sweep --vary P --lo 0 --hi 10 --steps 30 --d 2 --u -1 --lambda 1 --units bits";

    bool ran = true;
    ran &= run(1, sim_args, dir + "/fap_det_sim_1.csv");
    ran &= run(1, sim_args, dir + "/fap_det_sim_1b.csv");
    ran &= run(2, sim_args, dir + "/fap_det_sim_2.csv");
    ran &= run(8, sim_args, dir + "/fap_det_sim_8.csv");
    ran &= run(1, sweep_args, dir + "/fap_det_sweep_1.csv");
    ran &= run(2, sweep_args, dir + "/fap_det_sweep_2.csv");
    ran &= run(8, sweep_args, dir + "/fap_det_sweep_8.csv");
    c.require(ran, "CLI invocations succeed");
    if (!ran) return;

    const std::string sim1 = slurp(dir + "/fap_det_sim_1.csv");
    c.require(!sim1.empty(), "simulate output nonempty");
    c.require(sim1 == slurp(dir + "/fap_det_sim_1b.csv"), "repeat run identical");
    c.require(sim1 == slurp(dir + "/fap_det_sim_2.csv"), "2-worker run identical");
    c.require(sim1 == slurp(dir + "/fap_det_sim_8.csv"), "8-worker run identical");

    const std::string sweep1 = slurp(dir + "/fap_det_sweep_1.csv");
    c.require(!sweep1.empty(), "sweep output nonempty");
    c.require(sweep1 == slurp(dir + "/fap_det_sweep_2.csv"), "sweep 2-worker identical");
    c.require(sweep1 == slurp(dir + "/fap_det_sweep_8.csv"), "sweep 8-worker identical");
}

} // namespace

bool run_selftest(std::ostream& os, const std::string& cli_path) {
    struct Entry {
        const char* name;
        void (*fn)(Check&);
    };
    const Entry entries[] = {
        {"special functions", c1_special_functions},
        {"density normalization", c2_normalization},
        {"density formula consistency", c3_consistency},
        {"characteristic function", c4_characteristic_function},
        {"moments", c5_moments},
        {"entropy closed forms", c6_entropy},
        {"ancillary derivatives and bounds", c7_ancillary},
        {"capacity bounds and sweeps", c8_capacity},
        {"particle-based verification", c9_particles},
        {"weak stability", c10_stability},
    };

    bool all = true;
    int idx = 0;
    auto report = [&](const char* name, const Check& c, double secs) {
        ++idx;
        char line[160];
        std::snprintf(line, sizeof(line), "%2d. %-34s %s (%.1f s)%s%s\n", idx, name,
                      c.ok ? "pass" : "FAIL", secs, c.ok ? "" : "  -- ",
                      c.ok ? "" : c.detail.c_str());
        os << line;
        os.flush();
        all = all && c.ok;
    };

    for (const Entry& e : entries) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        e.fn(c);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report(e.name, c, secs);
    }

    {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        c11_determinism(c, cli_path);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report("output determinism", c, secs);
    }

    os << (all ? "selftest: all criteria passed\n" : "selftest: FAILURES present\n");
    return all;
}

} // namespace fapchan::selftest
