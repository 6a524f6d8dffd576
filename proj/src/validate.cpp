#include "fapchan/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fapchan/spectral.hpp"

namespace fapchan::validate {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Radial CDF F(r) = S_{d-1} int_0^r t^{d-1} f(t) dt tabulated on a uniform
// grid (per-panel Simpson), linear interpolation in between.
struct RadialCdf {
    double r_max;
    std::vector<double> F;

    RadialCdf(const VdfapParams& params, int panels = 4096) {
        const double au = -params.u;
        r_max = params.lambda + 45.0 / au;
        const double surface = params.d == 1 ? 2.0 : 2.0 * kPi;
        auto g = [&](double r) {
            const double radial = params.d == 1 ? 1.0 : r;
            return surface * radial * channel::vdfap_pdf_radial(r, params);
        };
        F.resize(panels + 1);
        F[0] = 0.0;
        const double h = r_max / panels;
        double prev = g(0.0);
        for (int i = 1; i <= panels; ++i) {
            const double b = i * h;
            const double gm = g(b - 0.5 * h);
            const double gb = g(b);
            F[i] = F[i - 1] + h / 6.0 * (prev + 4.0 * gm + gb);
            prev = gb;
        }
    }

    double operator()(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= r_max) return 1.0;
        const int n = static_cast<int>(F.size()) - 1;
        const double t = r / r_max * n;
        const int i = std::min(static_cast<int>(t), n - 1);
        return F[i] + (t - i) * (F[i + 1] - F[i]);
    }
};

std::vector<double> sample_radii(const FapSampleSet& samples) {
    std::vector<double> r(samples.absorbed);
    for (std::uint64_t i = 0; i < samples.absorbed; ++i) {
        double s = 0.0;
        for (double c : samples.sample(i)) s += c * c;
        r[i] = std::sqrt(s);
    }
    std::sort(r.begin(), r.end());
    return r;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace

double ks_critical_value(std::uint64_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

FitReport compare_density(const DensityGrid& empirical,
                          const PlanarChannelParams& params,
                          const CompareOptions& opts) {
    if (empirical.normalization != mcsim::GridNormalization::density)
        throw std::invalid_argument("compare_density: grid must use density normalization");
    if (static_cast<int>(empirical.axes.size()) != params.d)
        throw std::invalid_argument("compare_density: grid dimension mismatch");

    const double vol = empirical.cell_volume();
    FitReport rep;
    double sq = 0.0, l1 = 0.0;
    for (size_t i = 0; i < empirical.values.size(); ++i) {
        const double theory = channel::fap_pdf_plane(empirical.cell_center(i), params);
        const double diff_mass = (empirical.values[i] - theory) * vol;
        rep.max_abs_err = std::max(rep.max_abs_err, std::fabs(diff_mass));
        sq += diff_mass * diff_mass;
        l1 += std::fabs(diff_mass);
    }
    rep.rmse = std::sqrt(sq / empirical.values.size());
    rep.tv_distance = 0.5 * l1;

    const double M = static_cast<double>(std::max<std::uint64_t>(empirical.sample_count, 1));
    const double threshold = opts.k / std::sqrt(M);
    rep.thresholds["max_abs_mass_err"] = threshold;
    rep.pass = rep.max_abs_err <= threshold;
    return rep;
}

double ks_radial(const FapSampleSet& samples, const VdfapParams& params) {
    if (samples.absorbed == 0)
        throw std::invalid_argument("ks_radial: empty sample set");
    const RadialCdf cdf(params);
    const std::vector<double> r = sample_radii(samples);
    const double n = static_cast<double>(r.size());
    double ks = 0.0;
    for (size_t i = 0; i < r.size(); ++i) {
        const double F = cdf(r[i]);
        ks = std::max(ks, std::max(F - i / n, (i + 1) / n - F));
    }
    return ks;
}

FitReport ks_radial_report(const FapSampleSet& samples, const VdfapParams& params,
                           double alpha) {
    FitReport rep;
    rep.ks_statistic = ks_radial(samples, params);
    rep.low_power = samples.absorbed < 50;
    const double crit = ks_critical_value(samples.absorbed, alpha);
    rep.thresholds["ks_critical"] = crit;
    rep.pass = rep.low_power ? false : rep.ks_statistic < crit;
    return rep;
}

FitReport weak_stability_test(double u, double lambda1, double lambda2, int d,
                              std::uint64_t M, std::uint64_t seed) {
    const VdfapParams a(u, lambda1, d), b(u, lambda2, d);
    const VdfapParams ref = spectral::convolve_params(a, b);

    FapSampleSet s1 = mcsim::sample_vdfap_exact(a, M, sub_seed(seed, 1));
    const FapSampleSet s2 = mcsim::sample_vdfap_exact(b, M, sub_seed(seed, 2));
    for (size_t i = 0; i < s1.flat.size(); ++i) s1.flat[i] += s2.flat[i];

    return ks_radial_report(s1, ref);
}

FitReport moment_test(const FapSampleSet& samples, const VdfapParams& params) {
    if (samples.absorbed == 0)
        throw std::invalid_argument("moment_test: empty sample set");
    const int d = samples.d;
    const double n = static_cast<double>(samples.absorbed);

    const double target = params.lambda * d / -params.u;
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    double mean_r2 = 0.0, var_r2 = 0.0;
    for (std::uint64_t i = 0; i < samples.absorbed; ++i) {
        const auto s = samples.sample(i);
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) {
            mean[j] += s[j];
            r2 += s[j] * s[j];
        }
        mean_r2 += r2;
    }
    for (int j = 0; j < d; ++j) mean[j] /= n;
    mean_r2 /= n;
    for (std::uint64_t i = 0; i < samples.absorbed; ++i) {
        const auto s = samples.sample(i);
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) {
            const double c = s[j] - mean[j];
            var[j] += c * c;
            r2 += s[j] * s[j];
        }
        const double c2 = r2 - mean_r2;
        var_r2 += c2 * c2;
    }

    FitReport rep;
    double max_z = 0.0;
    for (int j = 0; j < d; ++j) {
        const double se = std::sqrt(var[j] / (n - 1.0)) / std::sqrt(n);
        max_z = std::max(max_z, std::fabs(mean[j]) / se);
    }
    const double se_r2 = std::sqrt(var_r2 / (n - 1.0)) / std::sqrt(n);
    max_z = std::max(max_z, std::fabs(mean_r2 - target) / se_r2);

    rep.max_abs_err = max_z; // largest |z| across the tested moments
    rep.thresholds["z_limit"] = 3.0;
    rep.pass = max_z < 3.0;
    return rep;
}

} // namespace fapchan::validate
