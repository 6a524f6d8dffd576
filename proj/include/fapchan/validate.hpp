#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fapchan/channel.hpp"
#include "fapchan/mcsim.hpp"

// Statistical comparison between theory and simulation: grid-error metrics,
// radial goodness of fit, moment z-tests and the empirical convolution
// stability check.

namespace fapchan::validate {

using channel::PlanarChannelParams;
using channel::VdfapParams;
using mcsim::DensityGrid;
using mcsim::FapSampleSet;

struct FitReport {
    double max_abs_err = 0.0;
    double rmse = 0.0;
    double tv_distance = 0.0;
    double ks_statistic = 0.0;
    bool pass = false;
    bool low_power = false;
    std::map<std::string, double> thresholds; // thresholds actually applied
};

struct CompareOptions {
    // pass iff the per-cell probability-mass error stays below k/sqrt(M)
    double k = 5.0;
};

// Grid (density normalization) against the closed-form planar density
// evaluated at cell centers. max_abs_err and rmse are reported in per-cell
// probability units; tv_distance is half the volume-weighted L1.
FitReport compare_density(const DensityGrid& empirical,
                          const PlanarChannelParams& params,
                          const CompareOptions& opts = {});

// One-sample Kolmogorov-Smirnov statistic of the sample radii against the
// radial CDF obtained by quadrature of the closed-form density.
double ks_radial(const FapSampleSet& samples, const VdfapParams& params);

// ks_radial wrapped in a verdict at significance alpha (asymptotic critical
// value); fewer than 50 samples triggers a low-power flag instead.
FitReport ks_radial_report(const FapSampleSet& samples, const VdfapParams& params,
                           double alpha = 0.01);

// Draws from VDFAP(u, l1) and VDFAP(u, l2), sums them, and tests the sum
// against VDFAP(u, l1 + l2) at the 1% KS level.
FitReport weak_stability_test(double u, double lambda1, double lambda2, int d,
                              std::uint64_t M, std::uint64_t seed);

// z-tests: each coordinate mean against 0, and mean ||N||^2 against the
// closed-form second moment; pass iff all |z| < 3.
FitReport moment_test(const FapSampleSet& samples, const VdfapParams& params);

// Asymptotic one-sample KS critical value at significance alpha.
double ks_critical_value(std::uint64_t n, double alpha);

} // namespace fapchan::validate
