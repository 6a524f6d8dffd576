// fap: command-line front end for the first-arrival-position channel library.
// Subcommands: density, cf, entropy, capacity, sweep, simulate, validate,
// selftest. Exit codes: 0 success, 1 parameter/domain error, 2 validation
// failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fapchan/capacity.hpp"
#include "fapchan/channel.hpp"
#include "fapchan/entropy.hpp"
#include "fapchan/mcsim.hpp"
#include "fapchan/selftest.hpp"
#include "fapchan/spectral.hpp"
#include "fapchan/validate.hpp"

using json = nlohmann::ordered_json;
using namespace fapchan;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    std::string timestamp; // empty unless requested; kept opt-in so repeated
                           // runs stay byte-identical

    void add(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
    void add(const std::string& k, double v) { add(k, fmt17(v)); }
    void add(const std::string& k, std::uint64_t v) { add(k, std::to_string(v)); }
    void add(const std::string& k, int v) { add(k, std::to_string(v)); }
    void add(const std::string& k, const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += fmt17(v[i]);
        }
        add(k, s);
    }

    void stamp() {
        const std::time_t t = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
        timestamp = buf;
    }

    void write_csv_header(std::ostream& os) const {
        os << "# command = " << command << "\n";
        os << "# tool_version = " << kVersion << "\n";
        if (!timestamp.empty()) os << "# timestamp = " << timestamp << "\n";
        for (const auto& [k, v] : params) os << "# " << k << " = " << v << "\n";
    }

    json to_json() const {
        json j;
        j["command"] = command;
        j["tool_version"] = kVersion;
        if (!timestamp.empty()) j["timestamp"] = timestamp;
        json p = json::object();
        for (const auto& [k, v] : params) p[k] = v;
        j["parameters"] = p;
        return j;
    }
};

// Output sink: path or stdout for "-".
struct Sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit Sink(const std::string& path) {
        if (path == "-") {
            os = &std::cout;
        } else {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
            os = &file;
        }
    }
    std::ostream& out() { return *os; }
};

std::vector<mcsim::GridAxis> parse_grid(const std::string& spec) {
    // "lo:hi:bins[,lo:hi:bins]"
    std::vector<mcsim::GridAxis> axes;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        mcsim::GridAxis a;
        char c1, c2;
        std::stringstream ps(part);
        if (!(ps >> a.lo >> c1 >> a.hi >> c2 >> a.bins) || c1 != ':' || c2 != ':' ||
            a.bins < 1 || !(a.hi > a.lo))
            throw std::invalid_argument("bad grid axis '" + part + "', want lo:hi:bins");
        axes.push_back(a);
    }
    if (axes.empty()) throw std::invalid_argument("empty grid spec");
    return axes;
}

const char* norm_name(mcsim::GridNormalization n) {
    return n == mcsim::GridNormalization::density ? "density" : "relative_frequency";
}

void emit_grid(const mcsim::DensityGrid& grid, const Manifest& man,
               const std::string& path, const std::string& format) {
    Sink sink(path);
    std::ostream& os = sink.out();
    if (format == "csv") {
        man.write_csv_header(os);
        for (size_t k = 0; k < grid.axes.size(); ++k) os << "n" << k + 1 << ",";
        os << "value\n";
        for (size_t i = 0; i < grid.values.size(); ++i) {
            for (double c : grid.cell_center(i)) os << fmt17(c) << ",";
            os << fmt17(grid.values[i]) << "\n";
        }
    } else {
        json j;
        json axes = json::array();
        for (const auto& a : grid.axes)
            axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"bins", a.bins}});
        j["axes"] = axes;
        j["values"] = grid.values;
        j["normalization"] = norm_name(grid.normalization);
        j["manifest"] = man.to_json();
        os << j.dump(2) << "\n";
    }
}

void emit_json(const json& body, const Manifest& man, const std::string& path) {
    Sink sink(path);
    json j = body;
    j["manifest"] = man.to_json();
    sink.out() << j.dump(2) << "\n";
}

json report_json(const validate::FitReport& rep) {
    json j;
    j["max_abs_err"] = rep.max_abs_err;
    j["rmse"] = rep.rmse;
    j["tv_distance"] = rep.tv_distance;
    j["ks_statistic"] = rep.ks_statistic;
    j["pass"] = rep.pass;
    j["low_power"] = rep.low_power;
    json th = json::object();
    for (const auto& [k, v] : rep.thresholds) th[k] = v;
    j["thresholds"] = th;
    return j;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat `key = value` config support: the file's pairs become --key value
// tokens inserted right after the subcommand, except for keys the user
// already passed on the command line (flags override the file).
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.empty()) return args;

    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    std::vector<std::string> inject;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line is not key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line has empty key");
        const std::string flag = "--" + key;
        bool overridden = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
        if (!overridden) {
            inject.push_back(flag);
            if (!value.empty()) inject.push_back(value);
        }
    }
    args.insert(args.begin() + 1, inject.begin(), inject.end());
    return args;
}

// Shared drift ingestion: --u is normalized (1/um); --v is physical (um/s)
// and is divided by sigma^2 = 2 D_coef exactly once, here.
struct DriftVecInput {
    std::vector<double> u, v;
    double D_coef = 840.0;

    void attach(CLI::App* cmd, const std::string& what) {
        auto* ou = cmd->add_option("--u", u, "normalized drift " + what + " (1/um)")
                       ->delimiter(',');
        auto* ov = cmd->add_option("--v", v, "physical drift " + what + " (um/s)")
                       ->delimiter(',');
        cmd->add_option("--D-coef", D_coef, "diffusion coefficient (um^2/s)")
            ->check(CLI::PositiveNumber);
        ou->excludes(ov);
        ov->excludes(ou);
    }
    std::vector<double> normalized(size_t want) const {
        std::vector<double> r;
        if (!u.empty() && !v.empty())
            throw std::invalid_argument("--u and --v are mutually exclusive");
        if (!u.empty()) {
            r = u;
        } else if (!v.empty()) {
            r = v;
            for (double& c : r) c /= 2.0 * D_coef;
        } else {
            throw std::invalid_argument("one of --u or --v is required");
        }
        if (r.size() != want)
            throw std::invalid_argument("drift needs " + std::to_string(want) +
                                        " components, got " + std::to_string(r.size()));
        return r;
    }
};

struct DriftScalarInput {
    double u = 0.0, v = 0.0;
    double D_coef = 840.0;
    CLI::Option *ou = nullptr, *ov = nullptr;

    void attach(CLI::App* cmd) {
        ou = cmd->add_option("--u", u, "normalized vertical drift (1/um), < 0");
        ov = cmd->add_option("--v", v, "physical vertical drift (um/s), < 0");
        cmd->add_option("--D-coef", D_coef, "diffusion coefficient (um^2/s)")
            ->check(CLI::PositiveNumber);
        ou->excludes(ov);
        ov->excludes(ou);
    }
    double normalized() const {
        if (ou->count()) return u;
        if (ov->count()) return v / (2.0 * D_coef);
        throw std::invalid_argument("one of --u or --v is required");
    }
};

int cmd_density(const std::string& out, const std::string& format, int d,
                const DriftVecInput& drift, double lambda, const std::string& grid_spec,
                double truncate, bool timestamp) {
    const auto axes = parse_grid(grid_spec);
    if (static_cast<int>(axes.size()) != d)
        throw std::invalid_argument("grid must have d axes");
    const channel::PlanarChannelParams params(d, drift.normalized(d + 1), lambda);
    mcsim::DensityGrid grid = mcsim::fill_from_pdf(axes, params);
    if (truncate > 0.0) mcsim::apply_truncation(grid, truncate);

    Manifest man;
    man.command = "density";
    if (timestamp) man.stamp();
    man.add("d", d);
    man.add("u", params.u);
    man.add("lambda", lambda);
    man.add("grid", grid_spec);
    if (truncate > 0.0) man.add("truncate", truncate);
    emit_grid(grid, man, out, format);
    return 0;
}

int cmd_cf(const std::string& out, int d, const DriftScalarInput& drift, double lambda,
           const std::vector<double>& omega, bool timestamp) {
    const channel::VdfapParams params(drift.normalized(), lambda, d);
    if (static_cast<int>(omega.size()) != d)
        throw std::invalid_argument("--omega needs d components");

    const auto m = spectral::vdfap_moments(params);
    json j;
    j["omega"] = omega;
    j["phi"] = spectral::vdfap_cf(omega, params);
    j["gradient"] = spectral::vdfap_cf_gradient(omega, params);
    j["hessian"] = spectral::vdfap_cf_hessian(omega, params);
    j["moments"] = {{"mean", m.mean},
                    {"correlation", m.correlation},
                    {"second_moment", m.second_moment}};

    Manifest man;
    man.command = "cf";
    if (timestamp) man.stamp();
    man.add("d", d);
    man.add("u", params.u);
    man.add("lambda", lambda);
    man.add("omega", omega);
    emit_json(j, man, out);
    return 0;
}

int cmd_entropy(const std::string& out, int d, const DriftScalarInput& drift,
                double lambda, std::string method, bool timestamp) {
    const channel::VdfapParams params(drift.normalized(), lambda, d);
    if (method.empty()) method = d == 2 ? "closed" : "quadrature";
    double h;
    if (method == "closed") {
        if (d != 2) throw std::invalid_argument("closed-form entropy requires d = 2");
        h = entropy::vdfap_entropy_2d(params.u, lambda);
    } else if (method == "quadrature") {
        h = entropy::entropy_quadrature(params);
    } else {
        throw std::invalid_argument("--method must be closed or quadrature");
    }

    json j;
    j["entropy_nats"] = h;
    j["entropy_bits"] = capacity::to_bits(h);
    j["method"] = method;

    Manifest man;
    man.command = "entropy";
    if (timestamp) man.stamp();
    man.add("d", d);
    man.add("u", params.u);
    man.add("lambda", lambda);
    man.add("method", method);
    emit_json(j, man, out);
    return 0;
}

int cmd_capacity(const std::string& out, int d, const DriftScalarInput& drift,
                 double lambda, double P, const std::string& units, bool timestamp) {
    const capacity::CapacityQuery q(d, drift.normalized(), lambda, P);
    capacity::CapacityResult r = capacity::bounds(q);
    if (units == "bits") {
        r.lower = capacity::to_bits(r.lower);
        r.upper = capacity::to_bits(r.upper);
    } else if (units != "nats") {
        throw std::invalid_argument("--units must be nats or bits");
    }

    json j;
    j["lower"] = r.lower;
    j["upper"] = r.upper;
    j["units"] = units;

    Manifest man;
    man.command = "capacity";
    if (timestamp) man.stamp();
    man.add("d", d);
    man.add("u", q.u);
    man.add("lambda", lambda);
    man.add("P", P);
    man.add("units", units);
    emit_json(j, man, out);
    return 0;
}

int cmd_sweep(const std::string& out, const std::string& format, const std::string& vary,
              double lo, double hi, int steps, int d, const DriftScalarInput& drift,
              double lambda, double P, const std::string& units, bool timestamp) {
    capacity::SweepVariable var;
    if (vary == "P") var = capacity::SweepVariable::P;
    else if (vary == "lambda") var = capacity::SweepVariable::lambda;
    else if (vary == "u") var = capacity::SweepVariable::u;
    else throw std::invalid_argument("--vary must be P, lambda, or u");
    const capacity::Units un = units == "bits" ? capacity::Units::bits
                             : units == "nats" ? capacity::Units::nats
                                               : throw std::invalid_argument(
                                                     "--units must be nats or bits");

    const capacity::CapacityQuery fixed(d, drift.normalized(), lambda, P);
    const auto rows = capacity::capacity_sweep(var, lo, hi, steps, fixed, un);

    Manifest man;
    man.command = "sweep";
    if (timestamp) man.stamp();
    man.add("vary", vary);
    man.add("lo", lo);
    man.add("hi", hi);
    man.add("steps", steps);
    man.add("d", d);
    man.add("u", fixed.u);
    man.add("lambda", lambda);
    man.add("P", P);
    man.add("units", units);

    Sink sink(out);
    std::ostream& os = sink.out();
    if (format == "csv") {
        man.write_csv_header(os);
        os << "x,lower,upper,valid\n";
        for (const auto& r : rows)
            os << fmt17(r.x) << "," << fmt17(r.lower) << "," << fmt17(r.upper) << ","
               << (r.valid ? 1 : 0) << "\n";
    } else {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"x", r.x}, {"lower", r.lower}, {"upper", r.upper},
                           {"valid", r.valid}});
        json j;
        j["rows"] = arr;
        j["units"] = units;
        j["manifest"] = man.to_json();
        os << j.dump(2) << "\n";
    }
    return 0;
}

void apply_preset(const std::string& name, mcsim::SimConfig& c) {
    // desk-scale reproductions of the particle runs: a zero-drift case and a
    // skewed-drift case, both launched 1 um above the absorbing plane
    if (name == "zero-drift") {
        c.ambient_dim = 3;
        c.D_coef = 840.0;
        c.drift = {0.0, 0.0, 0.0};
        c.drift_is_normalized = true;
        c.dt = 1e-5;
        c.lambda = 1.0;
        c.M = 100000;
    } else if (name == "skew-drift") {
        c.ambient_dim = 3;
        c.D_coef = 840.0;
        c.drift = {2.0, -3.0, -1.0};
        c.drift_is_normalized = true;
        c.dt = 1e-5;
        c.lambda = 1.0;
        c.M = 100000;
    } else if (!name.empty()) {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
}

int cmd_simulate(const std::string& out, const std::string& format,
                 const std::string& preset, mcsim::SimConfig cfg,
                 const DriftVecInput& drift, bool have_drift, bool exact,
                 const std::string& crossing, const std::string& hist_spec,
                 const std::string& normalization, double truncate, bool timestamp) {
    apply_preset(preset, cfg);
    if (have_drift) {
        cfg.drift = drift.normalized(cfg.ambient_dim);
        cfg.drift_is_normalized = true;
        cfg.D_coef = drift.D_coef;
    }
    if (crossing == "bridge") cfg.crossing_mode = mcsim::CrossingMode::bridge_corrected;
    else if (crossing != "step") throw std::invalid_argument("--crossing must be step or bridge");

    mcsim::FapSampleSet samples;
    if (exact) {
        const int d = cfg.ambient_dim - 1;
        for (int j = 0; j < d; ++j)
            if (cfg.drift[j] != 0.0)
                throw std::invalid_argument("--exact requires purely vertical drift");
        samples = mcsim::sample_vdfap_exact(
            channel::VdfapParams(cfg.drift[d], cfg.lambda, d), cfg.M, cfg.seed);
    } else {
        samples = mcsim::simulate_fap(cfg);
    }
    if (samples.all_escaped_warning)
        std::cerr << "warning: no trajectory was absorbed\n";

    Manifest man;
    man.command = "simulate";
    if (timestamp) man.stamp();
    if (!preset.empty()) man.add("preset", preset);
    man.add("ambient_dim", cfg.ambient_dim);
    man.add("drift", cfg.drift);
    man.add("D_coef", cfg.D_coef);
    man.add("dt", cfg.dt);
    man.add("lambda", cfg.lambda);
    man.add("M", cfg.M);
    man.add("seed", cfg.seed);
    man.add("sampler", exact ? "exact" : "euler-maruyama");
    if (!exact) man.add("crossing", crossing);
    man.add("absorbed", samples.absorbed);
    man.add("escaped", samples.escaped);

    if (!hist_spec.empty()) {
        const auto axes = parse_grid(hist_spec);
        const auto norm = normalization == "density"
                              ? mcsim::GridNormalization::density
                              : mcsim::GridNormalization::relative_frequency;
        if (normalization != "density" && normalization != "relative_frequency")
            throw std::invalid_argument(
                "--normalization must be density or relative_frequency");
        mcsim::DensityGrid grid = mcsim::build_histogram(samples, axes, norm);
        if (truncate > 0.0) mcsim::apply_truncation(grid, truncate);
        man.add("hist", hist_spec);
        man.add("normalization", normalization);
        if (truncate > 0.0) man.add("truncate", truncate);
        emit_grid(grid, man, out, format);
        return 0;
    }

    Sink sink(out);
    std::ostream& os = sink.out();
    if (format == "csv") {
        man.write_csv_header(os);
        for (int k = 0; k < samples.d; ++k) os << "n" << k + 1 << (k + 1 < samples.d ? "," : "\n");
        for (std::uint64_t i = 0; i < samples.absorbed; ++i) {
            const auto s = samples.sample(i);
            for (int k = 0; k < samples.d; ++k)
                os << fmt17(s[k]) << (k + 1 < samples.d ? "," : "\n");
        }
    } else {
        json j;
        j["d"] = samples.d;
        j["absorbed"] = samples.absorbed;
        j["escaped"] = samples.escaped;
        j["samples"] = samples.flat;
        j["manifest"] = man.to_json();
        os << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& out, const std::string& test, int d,
                 const DriftScalarInput& drift, double lambda, double lambda2,
                 std::optional<double> ref_u, std::optional<double> ref_lambda,
                 std::uint64_t M, std::uint64_t seed, const std::string& grid_spec,
                 bool timestamp) {
    const double u = drift.normalized();
    validate::FitReport rep;
    Manifest man;
    man.command = "validate";
    if (timestamp) man.stamp();
    man.add("test", test);
    man.add("d", d);
    man.add("u", u);
    man.add("lambda", lambda);
    man.add("M", M);
    man.add("seed", seed);

    // samples are drawn at (u, lambda); the theory reference defaults to the
    // same point and can be moved for fault-injection checks
    const channel::VdfapParams params(u, lambda, d);
    const channel::VdfapParams ref(ref_u.value_or(u), ref_lambda.value_or(lambda), d);
    if (ref_u) man.add("ref_u", *ref_u);
    if (ref_lambda) man.add("ref_lambda", *ref_lambda);

    if (test == "ks") {
        rep = validate::ks_radial_report(mcsim::sample_vdfap_exact(params, M, seed), ref);
    } else if (test == "moments") {
        rep = validate::moment_test(mcsim::sample_vdfap_exact(params, M, seed), ref);
    } else if (test == "stability") {
        man.add("lambda2", lambda2);
        rep = validate::weak_stability_test(u, lambda, lambda2, d, M, seed);
    } else if (test == "density") {
        const auto axes = parse_grid(grid_spec);
        const auto samples = mcsim::sample_vdfap_exact(params, M, seed);
        const auto grid =
            mcsim::build_histogram(samples, axes, mcsim::GridNormalization::density);
        man.add("grid", grid_spec);
        rep = validate::compare_density(grid, ref.as_planar());
    } else {
        throw std::invalid_argument("--test must be ks, moments, stability, or density");
    }

    emit_json(report_json(rep), man, out);
    return rep.pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-arrival-position channel toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // shared option storage
    std::string out = "-", format = "csv", units = "bits", method, config_path;
    int d = 2;
    double lambda = 1.0, P = 1.0, truncate = 0.0;
    bool timestamp = false;

    auto add_common = [&](CLI::App* c, bool with_format) {
        c->add_option("--out", out, "output path, - for stdout");
        if (with_format)
            c->add_option("--format", format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}));
        c->add_flag("--timestamp", timestamp, "embed a wall-clock timestamp");
        c->add_option("--config", config_path, "flat key=value defaults, flags override");
    };

    // density
    auto* cd = app.add_subcommand("density", "closed-form density on a grid");
    DriftVecInput den_drift;
    std::string grid_spec;
    cd->add_option("--d", d, "receiver dimension (1 or 2)");
    den_drift.attach(cd, "(d+1 components)");
    cd->add_option("--lambda", lambda, "source height (um)");
    cd->add_option("--grid", grid_spec, "lo:hi:bins[,lo:hi:bins]")->required();
    cd->add_option("--truncate", truncate, "zero cells below this value");
    add_common(cd, true);

    // cf
    auto* cc = app.add_subcommand("cf", "characteristic function and moments");
    DriftScalarInput cf_drift;
    std::vector<double> omega;
    cc->add_option("--d", d, "receiver dimension (1 or 2)");
    cf_drift.attach(cc);
    cc->add_option("--lambda", lambda, "source height (um)");
    cc->add_option("--omega", omega, "frequency vector (d components)")
        ->delimiter(',')
        ->required();
    add_common(cc, false);

    // entropy
    auto* ce = app.add_subcommand("entropy", "differential entropy");
    DriftScalarInput ent_drift;
    ce->add_option("--d", d, "receiver dimension (1 or 2)");
    ent_drift.attach(ce);
    ce->add_option("--lambda", lambda, "source height (um)");
    ce->add_option("--method", method, "closed or quadrature");
    add_common(ce, false);

    // capacity
    auto* cp = app.add_subcommand("capacity", "capacity bounds");
    DriftScalarInput cap_drift;
    cp->add_option("--d", d, "receiver dimension (1 or 2)");
    cap_drift.attach(cp);
    cp->add_option("--lambda", lambda, "source height (um)");
    cp->add_option("--P", P, "second-moment budget (um^2)");
    cp->add_option("--units", units, "nats or bits");
    add_common(cp, false);

    // sweep
    auto* cs = app.add_subcommand("sweep", "capacity bounds along one parameter");
    DriftScalarInput sw_drift;
    std::string vary = "P";
    double lo = 0.0, hi = 10.0;
    int steps = 50;
    cs->add_option("--vary", vary, "P, lambda, or u (drift magnitude)");
    cs->add_option("--lo", lo, "range start");
    cs->add_option("--hi", hi, "range end");
    cs->add_option("--steps", steps, "sample count");
    cs->add_option("--d", d, "receiver dimension (1 or 2)");
    sw_drift.attach(cs);
    cs->add_option("--lambda", lambda, "source height (um)");
    cs->add_option("--P", P, "second-moment budget (um^2)");
    cs->add_option("--units", units, "nats or bits");
    add_common(cs, true);

    // simulate
    auto* cm = app.add_subcommand("simulate", "first-passage Monte Carlo");
    DriftVecInput sim_drift;
    mcsim::SimConfig cfg;
    std::string preset, crossing = "step", hist_spec, normalization = "density";
    bool exact = false;
    cm->add_option("--preset", preset, "zero-drift or skew-drift");
    cm->add_option("--ambient-dim", cfg.ambient_dim, "space dimension D = d + 1");
    sim_drift.attach(cm, "(D components)");
    cm->add_option("--dt", cfg.dt, "time step (s)");
    cm->add_option("--lambda", cfg.lambda, "source height (um)");
    cm->add_option("--M", cfg.M, "trajectory count");
    cm->add_option("--seed", cfg.seed, "RNG seed");
    cm->add_option("--max-steps", cfg.max_steps, "per-trajectory step cap");
    cm->add_option("--crossing", crossing, "step or bridge");
    cm->add_flag("--exact", exact, "discretization-free sampler (vertical drift only)");
    cm->add_option("--hist", hist_spec, "emit a histogram on lo:hi:bins[,...]");
    cm->add_option("--normalization", normalization, "density or relative_frequency");
    cm->add_option("--truncate", truncate, "zero histogram cells below this value");
    add_common(cm, true);

    // validate
    auto* cv = app.add_subcommand("validate", "statistical checks against theory");
    DriftScalarInput val_drift;
    std::string test = "ks", val_grid = "-3:3:40,-3:3:40";
    double lambda2 = 1.0;
    std::optional<double> ref_u, ref_lambda;
    std::uint64_t M = 20000, seed = 0;
    cv->add_option("--test", test, "ks, moments, stability, or density");
    cv->add_option("--d", d, "receiver dimension (1 or 2)");
    val_drift.attach(cv);
    cv->add_option("--lambda", lambda, "source height (um)");
    cv->add_option("--lambda2", lambda2, "second height for the stability test");
    cv->add_option("--ref-u", ref_u, "theory reference drift (defaults to --u)");
    cv->add_option("--ref-lambda", ref_lambda, "theory reference height (defaults to --lambda)");
    cv->add_option("--M", M, "sample count");
    cv->add_option("--seed", seed, "RNG seed");
    cv->add_option("--grid", val_grid, "grid for the density test");
    add_common(cv, false);

    // selftest
    auto* ct = app.add_subcommand("selftest", "run the full acceptance suite");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<const char*> av;
    av.push_back(argv[0]);
    for (const std::string& a : args) av.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(av.size()), av.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cd->parsed())
            return cmd_density(out, format, d, den_drift, lambda, grid_spec, truncate,
                               timestamp);
        if (cc->parsed()) return cmd_cf(out, d, cf_drift, lambda, omega, timestamp);
        if (ce->parsed()) return cmd_entropy(out, d, ent_drift, lambda, method, timestamp);
        if (cp->parsed())
            return cmd_capacity(out, d, cap_drift, lambda, P, units, timestamp);
        if (cs->parsed())
            return cmd_sweep(out, format, vary, lo, hi, steps, d, sw_drift, lambda, P,
                             units, timestamp);
        if (cm->parsed())
            return cmd_simulate(out, format, preset, cfg, sim_drift,
                                !sim_drift.u.empty() || !sim_drift.v.empty(), exact,
                                crossing, hist_spec, normalization, truncate, timestamp);
        if (cv->parsed())
            return cmd_validate(out, test, d, val_drift, lambda, lambda2, ref_u,
                                ref_lambda, M, seed, val_grid, timestamp);
        if (ct->parsed()) return selftest::run_selftest(std::cout, argv[0]) ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
