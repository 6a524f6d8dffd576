#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fapchan/channel.hpp"

// Particle-based first-passage Monte Carlo: Euler-Maruyama trajectories to an
// absorbing hyperplane, a discretization-free exact sampler for the
// vertical-drift family, and histogram construction.
//
// Determinism contract: every result is a pure function of the config
// including the seed. Trajectories use counter-based substreams keyed by
// (seed, index), so the worker count never changes the output. Worker count
// comes from the FAPSIM_THREADS environment variable (default: all cores).

namespace fapchan::mcsim {

enum class CrossingMode {
    step_after_crossing, // record the position at the first step past the plane
    bridge_corrected     // linearly interpolated crossing point
};

struct SimConfig {
    int ambient_dim = 3;           // D = d + 1, >= 2
    double D_coef = 840.0;         // um^2/s, sigma^2 = 2 D_coef
    std::vector<double> drift;     // D components
    bool drift_is_normalized = true; // true: u (1/um); false: physical v (um/s)
    double dt = 1e-5;              // s
    double lambda = 1.0;           // um, source height
    std::uint64_t M = 100000;      // trajectory count
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 10000000;
    CrossingMode crossing_mode = CrossingMode::step_after_crossing;

    void validate() const;
    double sigma2() const { return 2.0 * D_coef; }
    // physical drift vector (um/s)
    std::vector<double> physical_drift() const;
};

struct FapSampleSet {
    int d = 0;
    std::vector<double> flat; // absorbed * d, row-major
    std::uint64_t absorbed = 0;
    std::uint64_t escaped = 0;
    SimConfig config_echo;
    double wall_time = 0.0;
    bool all_escaped_warning = false;

    std::span<const double> sample(std::uint64_t i) const {
        return {flat.data() + i * d, static_cast<size_t>(d)};
    }
};

struct GridAxis {
    double lo, hi;
    int bins;
};

enum class GridNormalization { relative_frequency, density };

struct DensityGrid {
    std::vector<GridAxis> axes;
    std::vector<double> values; // row-major over axes
    GridNormalization normalization = GridNormalization::density;
    std::uint64_t sample_count = 0; // M of the originating run (0: analytic fill)
    std::uint64_t out_of_grid = 0;

    double cell_volume() const;
    size_t index(std::span<const int> idx) const;
    std::vector<double> cell_center(size_t flat_index) const;
};

// Euler-Maruyama first-passage run: trajectories start at [0,..,0,lambda] and
// are absorbed when the vertical coordinate first goes negative.
FapSampleSet simulate_fap(const SimConfig& config);

// Exact draws from the vertical-drift family via the first-passage-time
// decomposition: T inverse-Gaussian, parallel coordinates N(0, sigma^2 T).
FapSampleSet sample_vdfap_exact(const channel::VdfapParams& params,
                                std::uint64_t M, std::uint64_t seed);

DensityGrid build_histogram(const FapSampleSet& samples,
                            const std::vector<GridAxis>& axes,
                            GridNormalization normalization);

// Presentation filter: zero every cell below the threshold.
void apply_truncation(DensityGrid& grid, double threshold);

// Fill a grid analytically from the planar density (comparison aid).
DensityGrid fill_from_pdf(const std::vector<GridAxis>& axes,
                          const channel::PlanarChannelParams& params);

int worker_count();

} // namespace fapchan::mcsim
