#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string("\"") + FAP_CLI_PATH + "\" " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

int count_lines(const std::string& s, bool data_only) {
    std::istringstream ss(s);
    std::string line;
    int n = 0;
    while (std::getline(ss, line)) {
        if (data_only && (line.empty() || line[0] == '#')) continue;
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("capacity subcommand emits the reference bounds as JSON") {
    const RunResult r = run("capacity --d 2 --u -1 --lambda 1 --P 1 --units bits");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::fabs(j["lower"].get<double>() - 0.6545) < 1e-3);
    CHECK(std::fabs(j["upper"].get<double>() - 0.7593) < 1e-3);
    CHECK(j["units"] == "bits");
    CHECK(j["manifest"]["command"] == "capacity");
}

TEST_CASE("density subcommand emits a full CSV grid") {
    const RunResult r = run("density --d 2 --u 0,0,-1 --lambda 1 --grid -3:3:60,-3:3:60");
    REQUIRE(r.code == 0);
    // header row + 3600 data rows, manifest lines prefixed with #
    CHECK(count_lines(r.out, true) == 3601);
    CHECK(r.out.find("# command = density") != std::string::npos);
    CHECK(r.out.find("n1,n2,value") != std::string::npos);

    // peak cell value near 1/pi (cell centers sit 0.05 off the origin)
    double peak = 0.0;
    std::istringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
        const auto last = line.rfind(',');
        peak = std::max(peak, std::stod(line.substr(last + 1)));
    }
    CHECK(std::fabs(peak - 0.31831) < 5e-3);
}

TEST_CASE("density JSON round-trips values bit-exactly") {
    const RunResult r = run("density --d 2 --u 0.3,-0.2,-1 --lambda 1.5 "
                            "--grid -2:2:8,-2:2:8 --format json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["axes"].size() == 2);
    CHECK(j["values"].size() == 64);
    CHECK(j["normalization"] == "density");
    // identical invocation must serialize identically
    const RunResult again = run("density --d 2 --u 0.3,-0.2,-1 --lambda 1.5 "
                                "--grid -2:2:8,-2:2:8 --format json");
    CHECK(again.out == r.out);
}

TEST_CASE("cf subcommand reports moments") {
    const RunResult r = run("cf --d 2 --u -1 --lambda 1 --omega 0,0");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["phi"].get<double>() == 1.0);
    CHECK(std::fabs(j["moments"]["second_moment"].get<double>() - 2.0) < 1e-12);
}

TEST_CASE("entropy subcommand with physical drift input") {
    // v = -1680 um/s, D = 840 um^2/s -> u = -1
    const RunResult a = run("entropy --d 2 --u -1 --lambda 1");
    const RunResult b = run("entropy --d 2 --v -1680 --D-coef 840 --lambda 1");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    const double ha = json::parse(a.out)["entropy_nats"].get<double>();
    const double hb = json::parse(b.out)["entropy_nats"].get<double>();
    CHECK(ha == hb);
    CHECK(std::fabs(ha - 2.717016415768041) < 1e-12);
}

TEST_CASE("config file provides defaults and flags override") {
    const std::string cfg = "/tmp/fap_cli_test.cfg";
    {
        std::ofstream f(cfg);
        f << "# defaults for the entropy runs\n";
        f << "lambda=2\n";
        f << "u=-1\n";
        f << "d=2\n";
    }
    const RunResult file_only = run("entropy --config " + cfg);
    REQUIRE(file_only.code == 0);
    const RunResult explicit_run = run("entropy --d 2 --u -1 --lambda 2");
    CHECK(json::parse(file_only.out)["entropy_nats"] ==
          json::parse(explicit_run.out)["entropy_nats"]);

    const RunResult overridden = run("entropy --config " + cfg + " --lambda 1");
    REQUIRE(overridden.code == 0);
    CHECK(std::fabs(json::parse(overridden.out)["entropy_nats"].get<double>() -
                    2.717016415768041) < 1e-12);
}

TEST_CASE("sweep emits a CSV table") {
    const RunResult r = run("sweep --vary P --lo 0 --hi 10 --steps 10 --d 2 --u -1 "
                            "--lambda 1 --units bits");
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out, true) == 11); // header + 10 rows
    CHECK(r.out.find("x,lower,upper,valid") != std::string::npos);
}

TEST_CASE("simulate is byte-identical across reruns and emits histograms") {
    const std::string args = "simulate --ambient-dim 3 --u 0,0,-1 --dt 1e-4 --lambda 1 "
                             "--M 500 --seed 7";
    const RunResult a = run(args);
    const RunResult b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(count_lines(a.out, true) == 501); // header + one row per absorbed sample

    const RunResult h = run(args + " --hist -3:3:6,-3:3:6 --normalization relative_frequency");
    REQUIRE(h.code == 0);
    CHECK(count_lines(h.out, true) == 37);
}

TEST_CASE("exact sampler through the CLI") {
    const RunResult r = run("simulate --ambient-dim 3 --u 0,0,-1 --lambda 1 --M 200 "
                            "--seed 3 --exact");
    REQUIRE(r.code == 0);
    CHECK(count_lines(r.out, true) == 201);
    // exact sampling demands vertical drift
    const RunResult bad = run("simulate --ambient-dim 3 --u 1,0,-1 --lambda 1 --M 10 --exact");
    CHECK(bad.code == 1);
}

TEST_CASE("presets configure the desk-scale particle runs") {
    const RunResult r = run("simulate --preset skew-drift --M 300 --dt 1e-4 --seed 1");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# preset = skew-drift") != std::string::npos);
    CHECK(r.out.find("# drift = 2,-3,-1") != std::string::npos);
    const RunResult bad = run("simulate --preset nonsense --M 10");
    CHECK(bad.code == 1);
}

TEST_CASE("validate subcommand verdicts map to exit codes") {
    const RunResult ok = run("validate --test ks --d 2 --u -1 --lambda 1 --M 5000 --seed 11");
    REQUIRE(ok.code == 0);
    const json j = json::parse(ok.out);
    CHECK(j["pass"] == true);
    CHECK(j["ks_statistic"].get<double>() > 0.0);

    // moment test against a deliberately wrong reference: exit 2
    const RunResult bad =
        run("validate --test moments --d 2 --u -1 --lambda 1 --ref-lambda 2 --M 5000 --seed 11");
    CHECK(bad.code == 2);
    CHECK(json::parse(bad.out)["pass"] == false);
}

TEST_CASE("parameter errors exit 1") {
    CHECK(run("capacity --d 2 --u 1 --lambda 1 --P 1").code == 1);  // u > 0
    CHECK(run("capacity --d 2 --u -1 --lambda 1 --P 1 --units furlongs").code == 1);
    CHECK(run("density --d 2 --u 0,0,-1 --lambda 1 --grid bogus").code == 1);
    CHECK(run("entropy --d 2 --lambda 1").code == 1); // drift missing
    CHECK(run("entropy --d 2 --u -1 --v -1680 --lambda 1").code == 1); // exclusive
    CHECK(run("no-such-command").code == 1);
}

TEST_CASE("timestamp is opt-in") {
    const RunResult off = run("capacity --d 2 --u -1 --lambda 1 --P 1");
    CHECK(off.out.find("timestamp") == std::string::npos);
    const RunResult on = run("capacity --d 2 --u -1 --lambda 1 --P 1 --timestamp");
    CHECK(on.out.find("timestamp") != std::string::npos);
}
