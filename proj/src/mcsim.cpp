#include "fapchan/mcsim.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace fapchan::mcsim {

namespace {

// splitmix64-based counter stream; cheap, seedable, and identical regardless
// of scheduling.
struct Stream {
    std::uint64_t state;

    explicit Stream(std::uint64_t seed, std::uint64_t index) {
        // mix seed and trajectory index into a well-spread initial state
        state = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        for (int i = 0; i < 3; ++i) next_u64();
    }
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { // (0, 1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    // Box-Muller, spelled out so the stream is platform-independent
    bool have_spare = false;
    double spare = 0.0;
    double normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare = r * std::sin(a);
        have_spare = true;
        return r * std::cos(a);
    }
};

struct TrajectoryResult {
    bool absorbed = false;
    double pos[8]; // first d coordinates, d <= 8 is plenty
};

} // namespace

void SimConfig::validate() const {
    if (ambient_dim < 2) throw std::invalid_argument("SimConfig: ambient_dim must be >= 2");
    if (ambient_dim > 9) throw std::invalid_argument("SimConfig: ambient_dim too large");
    if (!(D_coef > 0.0)) throw std::invalid_argument("SimConfig: D_coef must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("SimConfig: lambda must be > 0");
    if (max_steps < 1) throw std::invalid_argument("SimConfig: max_steps must be >= 1");
    if (static_cast<int>(drift.size()) != ambient_dim)
        throw std::invalid_argument("SimConfig: drift must have ambient_dim components");
    for (double v : drift)
        if (!std::isfinite(v)) throw std::invalid_argument("SimConfig: non-finite drift");
}

std::vector<double> SimConfig::physical_drift() const {
    std::vector<double> v = drift;
    if (drift_is_normalized)
        for (double& c : v) c *= sigma2();
    return v;
}

int worker_count() {
    if (const char* env = std::getenv("FAPSIM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

FapSampleSet simulate_fap(const SimConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const int D = config.ambient_dim;
    const int d = D - 1;
    const std::vector<double> v = config.physical_drift();
    const double step_sigma = std::sqrt(config.sigma2() * config.dt);
    const std::uint64_t M = config.M;

    std::vector<TrajectoryResult> results(M);

    auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<double> x(D);
        for (std::uint64_t i = begin; i < end; ++i) {
            Stream rng(config.seed, i);
            for (int j = 0; j < d; ++j) x[j] = 0.0;
            x[d] = config.lambda;
            TrajectoryResult& out = results[i];
            double prev_vert = x[d];
            double prev_par[8];
            for (std::uint64_t step = 0; step < config.max_steps; ++step) {
                for (int j = 0; j < d; ++j) prev_par[j] = x[j];
                prev_vert = x[d];
                for (int j = 0; j < D; ++j)
                    x[j] += v[j] * config.dt + step_sigma * rng.normal();
                if (x[d] < 0.0) {
                    out.absorbed = true;
                    if (config.crossing_mode == CrossingMode::step_after_crossing) {
                        for (int j = 0; j < d; ++j) out.pos[j] = x[j];
                    } else {
                        const double frac = prev_vert / (prev_vert - x[d]);
                        for (int j = 0; j < d; ++j)
                            out.pos[j] = prev_par[j] + frac * (x[j] - prev_par[j]);
                    }
                    break;
                }
            }
        }
    };

    const int workers = worker_count();
    if (workers <= 1 || M < 2) {
        run_block(0, M);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (M + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t b = w * chunk;
            const std::uint64_t e = std::min(M, b + chunk);
            if (b >= e) break;
            threads.emplace_back(run_block, b, e);
        }
        for (auto& t : threads) t.join();
    }

    FapSampleSet set;
    set.d = d;
    set.config_echo = config;
    for (const TrajectoryResult& r : results) {
        if (r.absorbed) {
            ++set.absorbed;
            set.flat.insert(set.flat.end(), r.pos, r.pos + d);
        } else {
            ++set.escaped;
        }
    }
    set.all_escaped_warning = (M > 0 && set.absorbed == 0);
    set.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return set;
}

FapSampleSet sample_vdfap_exact(const channel::VdfapParams& params,
                                std::uint64_t M, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const int d = params.d;
    if (d > 8) throw std::invalid_argument("sample_vdfap_exact: d too large");

    // Work in sigma^2 = 1 units: vertical drift u, first-passage time
    // T ~ IG(mean = lambda/|u|, shape = lambda^2), parallel coords N(0, T).
    const double au = -params.u;
    const double mu = params.lambda / au;
    const double shape = params.lambda * params.lambda;

    FapSampleSet set;
    set.d = d;
    set.flat.resize(M * d);
    set.absorbed = M;
    set.config_echo.ambient_dim = d + 1;
    set.config_echo.lambda = params.lambda;
    set.config_echo.M = M;
    set.config_echo.seed = seed;
    set.config_echo.drift.assign(d + 1, 0.0);
    set.config_echo.drift[d] = params.u;

    auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            Stream rng(seed, i);
            // Michael-Schucany-Haas inverse-Gaussian transform
            const double z = rng.normal();
            const double nu = z * z;
            const double x = mu + mu * mu * nu / (2.0 * shape) -
                             mu / (2.0 * shape) *
                                 std::sqrt(4.0 * mu * shape * nu + mu * mu * nu * nu);
            const double t = (rng.uniform() <= mu / (mu + x)) ? x : mu * mu / x;
            const double sd = std::sqrt(t);
            for (int j = 0; j < d; ++j)
                set.flat[i * d + j] = sd * rng.normal();
        }
    };

    const int workers = worker_count();
    if (workers <= 1 || M < 2) {
        run_block(0, M);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (M + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t b = w * chunk;
            const std::uint64_t e = std::min(M, b + chunk);
            if (b >= e) break;
            threads.emplace_back(run_block, b, e);
        }
        for (auto& t : threads) t.join();
    }

    set.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return set;
}

double DensityGrid::cell_volume() const {
    double v = 1.0;
    for (const GridAxis& a : axes) v *= (a.hi - a.lo) / a.bins;
    return v;
}

size_t DensityGrid::index(std::span<const int> idx) const {
    size_t flat = 0;
    for (size_t k = 0; k < axes.size(); ++k) flat = flat * axes[k].bins + idx[k];
    return flat;
}

std::vector<double> DensityGrid::cell_center(size_t flat_index) const {
    std::vector<double> c(axes.size());
    for (size_t k = axes.size(); k-- > 0;) {
        const GridAxis& a = axes[k];
        const int i = static_cast<int>(flat_index % a.bins);
        flat_index /= a.bins;
        c[k] = a.lo + (i + 0.5) * (a.hi - a.lo) / a.bins;
    }
    return c;
}

DensityGrid build_histogram(const FapSampleSet& samples,
                            const std::vector<GridAxis>& axes,
                            GridNormalization normalization) {
    if (static_cast<int>(axes.size()) != samples.d)
        throw std::invalid_argument("build_histogram: axis count must match sample dimension");
    size_t cells = 1;
    for (const GridAxis& a : axes) {
        if (a.bins < 1 || !(a.hi > a.lo))
            throw std::invalid_argument("build_histogram: malformed axis");
        cells *= a.bins;
    }

    DensityGrid grid;
    grid.axes = axes;
    grid.values.assign(cells, 0.0);
    grid.normalization = normalization;
    grid.sample_count = samples.absorbed + samples.escaped;

    std::vector<int> idx(axes.size());
    for (std::uint64_t i = 0; i < samples.absorbed; ++i) {
        const auto s = samples.sample(i);
        bool inside = true;
        for (size_t k = 0; k < axes.size(); ++k) {
            const GridAxis& a = axes[k];
            const double t = (s[k] - a.lo) / (a.hi - a.lo) * a.bins;
            const int b = static_cast<int>(std::floor(t));
            if (b < 0 || b >= a.bins) {
                inside = false;
                break;
            }
            idx[k] = b;
        }
        if (inside) grid.values[grid.index(idx)] += 1.0;
        else ++grid.out_of_grid;
    }

    const double M = static_cast<double>(std::max<std::uint64_t>(grid.sample_count, 1));
    const double scale = normalization == GridNormalization::relative_frequency
                             ? 1.0 / M
                             : 1.0 / (M * grid.cell_volume());
    for (double& v : grid.values) v *= scale;
    return grid;
}

void apply_truncation(DensityGrid& grid, double threshold) {
    for (double& v : grid.values)
        if (v < threshold) v = 0.0;
}

DensityGrid fill_from_pdf(const std::vector<GridAxis>& axes,
                          const channel::PlanarChannelParams& params) {
    size_t cells = 1;
    for (const GridAxis& a : axes) cells *= a.bins;
    DensityGrid grid;
    grid.axes = axes;
    grid.values.resize(cells);
    grid.normalization = GridNormalization::density;
    for (size_t i = 0; i < cells; ++i)
        grid.values[i] = channel::fap_pdf_plane(grid.cell_center(i), params);
    return grid;
}

} // namespace fapchan::mcsim
