#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <array>
#include <cstdlib>

#include "fapchan/mcsim.hpp"

using namespace fapchan;
using namespace fapchan::mcsim;

namespace {

// sigma^2 = 1 units so normalized and physical drift coincide
SimConfig unit_config() {
    SimConfig c;
    c.ambient_dim = 3;
    c.D_coef = 0.5;
    c.drift = {0.0, 0.0, -1.0};
    c.dt = 1e-3;
    c.lambda = 1.0;
    c.M = 2000;
    c.seed = 42;
    c.max_steps = 200000;
    return c;
}

} // namespace

TEST_CASE("config validation and unit conversion") {
    SimConfig c = unit_config();
    c.validate();
    CHECK(c.sigma2() == doctest::Approx(1.0));

    SimConfig phys;
    phys.ambient_dim = 2;
    phys.drift = {0.0, -1.0};
    const auto v = phys.physical_drift();
    CHECK(v[1] == doctest::Approx(-1680.0)); // u = -1, sigma^2 = 2 * 840

    phys.drift_is_normalized = false;
    CHECK(phys.physical_drift()[1] == doctest::Approx(-1.0));

    SimConfig bad = unit_config();
    bad.drift = {0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = unit_config();
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = unit_config();
    bad.ambient_dim = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("simulation is deterministic and worker-count independent") {
    const SimConfig c = unit_config();
    setenv("FAPSIM_THREADS", "1", 1);
    const FapSampleSet a = simulate_fap(c);
    const FapSampleSet b = simulate_fap(c);
    CHECK(a.flat == b.flat);
    CHECK(a.absorbed == b.absorbed);

    setenv("FAPSIM_THREADS", "3", 1);
    const FapSampleSet t3 = simulate_fap(c);
    CHECK(a.flat == t3.flat);
    CHECK(a.absorbed == t3.absorbed);
    unsetenv("FAPSIM_THREADS");

    SimConfig c2 = c;
    c2.seed = 43;
    const FapSampleSet other = simulate_fap(c2);
    CHECK(a.flat != other.flat);
}

TEST_CASE("worker count env override") {
    setenv("FAPSIM_THREADS", "5", 1);
    CHECK(worker_count() == 5);
    setenv("FAPSIM_THREADS", "junk", 1);
    CHECK(worker_count() >= 1); // falls back to hardware count
    unsetenv("FAPSIM_THREADS");
    CHECK(worker_count() >= 1);
}

TEST_CASE("downward drift absorbs every trajectory") {
    const FapSampleSet s = simulate_fap(unit_config());
    CHECK(s.absorbed == 2000);
    CHECK(s.escaped == 0);
    CHECK_FALSE(s.all_escaped_warning);
    CHECK(s.d == 2);
    CHECK(s.wall_time > 0.0);
}

TEST_CASE("upward drift escapes with probability about 1 - e^{-2}") {
    SimConfig c = unit_config();
    c.drift = {0.0, 0.0, 1.0};
    c.M = 4000;
    c.max_steps = 20000; // 20 s horizon, late absorptions negligible
    const FapSampleSet s = simulate_fap(c);
    const double frac = static_cast<double>(s.absorbed) / c.M;
    // absorbed fraction ~ e^{-2 u lambda} = e^{-2} ~ 0.1353, sd ~ 0.0054
    CHECK(frac == doctest::Approx(std::exp(-2.0)).epsilon(0.2));
    CHECK(s.escaped == c.M - s.absorbed);
}

TEST_CASE("simulated moments match the channel moments") {
    SimConfig c = unit_config();
    c.M = 20000;
    c.dt = 2e-4;
    const FapSampleSet s = simulate_fap(c);
    REQUIRE(s.absorbed == c.M);
    double m1 = 0.0, m2 = 0.0, r2 = 0.0;
    for (std::uint64_t i = 0; i < s.absorbed; ++i) {
        const auto p = s.sample(i);
        m1 += p[0];
        m2 += p[1];
        r2 += p[0] * p[0] + p[1] * p[1];
    }
    const double n = static_cast<double>(s.absorbed);
    m1 /= n;
    m2 /= n;
    r2 /= n;
    // E N = 0, E ||N||^2 = lambda d / |u| = 2; heavy tails, loose gates
    CHECK(std::fabs(m1) < 0.1);
    CHECK(std::fabs(m2) < 0.1);
    CHECK(r2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("exact sampler determinism and moments") {
    const channel::VdfapParams p(-1.0, 1.0, 2);
    setenv("FAPSIM_THREADS", "1", 1);
    const FapSampleSet a = sample_vdfap_exact(p, 50000, 7);
    setenv("FAPSIM_THREADS", "4", 1);
    const FapSampleSet b = sample_vdfap_exact(p, 50000, 7);
    unsetenv("FAPSIM_THREADS");
    CHECK(a.flat == b.flat);
    CHECK(a.absorbed == 50000);

    double m1 = 0.0, r2 = 0.0;
    for (std::uint64_t i = 0; i < a.absorbed; ++i) {
        const auto s = a.sample(i);
        m1 += s[0];
        r2 += s[0] * s[0] + s[1] * s[1];
    }
    const double n = static_cast<double>(a.absorbed);
    CHECK(std::fabs(m1 / n) < 0.05);
    CHECK(r2 / n == doctest::Approx(2.0).epsilon(0.1));

    // lambda scaling: correlation lambda / |u| per coordinate
    const FapSampleSet big = sample_vdfap_exact(channel::VdfapParams(-2.0, 4.0, 1), 50000, 9);
    double v = 0.0;
    for (std::uint64_t i = 0; i < big.absorbed; ++i) v += big.sample(i)[0] * big.sample(i)[0];
    CHECK(v / 50000.0 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("histogram bookkeeping") {
    FapSampleSet s;
    s.d = 2;
    s.flat = {0.5, 0.5, -0.5, -0.5, 0.5, -0.5, 3.0, 3.0};
    s.absorbed = 4;
    const std::vector<GridAxis> axes = {{-1.0, 1.0, 2}, {-1.0, 1.0, 2}};

    DensityGrid rel = build_histogram(s, axes, GridNormalization::relative_frequency);
    CHECK(rel.sample_count == 4);
    CHECK(rel.out_of_grid == 1);
    // cell (1,1) holds (0.5, 0.5): 1/4
    CHECK(rel.values[rel.index(std::array<int, 2>{1, 1})] == doctest::Approx(0.25));
    CHECK(rel.values[rel.index(std::array<int, 2>{0, 0})] == doctest::Approx(0.25));
    CHECK(rel.values[rel.index(std::array<int, 2>{1, 0})] == doctest::Approx(0.25));
    CHECK(rel.values[rel.index(std::array<int, 2>{0, 1})] == 0.0);

    DensityGrid den = build_histogram(s, axes, GridNormalization::density);
    CHECK(den.cell_volume() == doctest::Approx(1.0));
    CHECK(den.values[den.index(std::array<int, 2>{1, 1})] == doctest::Approx(0.25));

    apply_truncation(rel, 0.3);
    for (double v : rel.values) CHECK(v == 0.0);

    CHECK_THROWS_AS(build_histogram(s, {{-1.0, 1.0, 2}}, GridNormalization::density),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_histogram(s, {{-1.0, 1.0, 2}, {1.0, -1.0, 2}},
                                    GridNormalization::density),
                    std::invalid_argument);
}

TEST_CASE("cell centers round-trip through the flat index") {
    DensityGrid g;
    g.axes = {{-3.0, 3.0, 6}, {0.0, 1.0, 4}};
    g.values.assign(24, 0.0);
    const auto c0 = g.cell_center(0);
    CHECK(c0[0] == doctest::Approx(-2.5));
    CHECK(c0[1] == doctest::Approx(0.125));
    const auto clast = g.cell_center(23);
    CHECK(clast[0] == doctest::Approx(2.5));
    CHECK(clast[1] == doctest::Approx(0.875));
    CHECK(g.index(std::array<int, 2>{5, 3}) == 23);
}

TEST_CASE("analytic grid fill matches the density at centers") {
    const channel::PlanarChannelParams p(2, {0.0, 0.0, -1.0}, 1.0);
    const std::vector<GridAxis> axes = {{-2.0, 2.0, 8}, {-2.0, 2.0, 8}};
    const DensityGrid g = fill_from_pdf(axes, p);
    CHECK(g.sample_count == 0);
    for (size_t i = 0; i < g.values.size(); ++i)
        CHECK(g.values[i] ==
              doctest::Approx(channel::fap_pdf_plane(g.cell_center(i), p)).epsilon(1e-14));
}

TEST_CASE("bridge correction shifts positions toward the crossing plane") {
    SimConfig c = unit_config();
    c.dt = 5e-3; // coarse on purpose so the overshoot is visible
    c.M = 5000;
    const FapSampleSet step = simulate_fap(c);
    c.crossing_mode = CrossingMode::bridge_corrected;
    const FapSampleSet bridge = simulate_fap(c);
    REQUIRE(step.absorbed == bridge.absorbed);
    CHECK(step.flat != bridge.flat);

    // the corrected spread should not exceed the overshoot spread
    auto mean_r2 = [](const FapSampleSet& s) {
        double r2 = 0.0;
        for (std::uint64_t i = 0; i < s.absorbed; ++i) {
            const auto p = s.sample(i);
            r2 += p[0] * p[0] + p[1] * p[1];
        }
        return r2 / static_cast<double>(s.absorbed);
    };
    CHECK(mean_r2(bridge) <= mean_r2(step));
}
