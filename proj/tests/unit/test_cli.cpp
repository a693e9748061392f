#include <sys/wait.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/app.hpp"
#include "cli/config.hpp"
#include "doctest.h"
#include "hetnet/error.hpp"

using namespace hetnet;
using namespace hetnet::cli;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::filesystem::path scratch() {
    const auto dir = std::filesystem::temp_directory_path() / "hetnet_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

Result run_cli(const std::string& args, const std::string& env = "") {
    const std::string err_path = (scratch() / "stderr.txt").string();
    const std::string cmd = env + " " + HETNET_CLI_PATH + " " + args + " 2>" + err_path;
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream e(err_path);
    std::stringstream ss;
    ss << e.rdbuf();
    r.err = ss.str();
    return r;
}

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = scratch() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("decibel keys convert to linear power ratios") {
    const RunConfig c = parse_config(R"({"B_s_db": 20, "P_m_db": 30, "T_s_db": -10, "beta": 2})");
    CHECK(c.spec.base_params.B_s == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(c.spec.base_params.P_m == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(c.spec.base_thresholds.T_s == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(c.spec.base_params.beta == 2.0);
    CHECK(!c.has_sweep);
}

TEST_CASE("config errors are anchored to their line") {
    CHECK_THROWS_WITH_AS(parse_config("{\n  \"B_s\": 3,\n  \"bogus\": 1\n}", "cfg.json"),
                         "cfg.json:3: unknown key 'bogus'", InputError);
    CHECK_THROWS_WITH_AS(parse_config("{\n  \"B_s\": 3,\n  \"eta\": \"high\"\n}", "cfg.json"),
                         "cfg.json:3: 'eta' must be a number", InputError);
    try {
        parse_config("{\n  \"B_s\": 3,\n\n  \"eta\" 0.5\n}", "cfg.json");
        FAIL("expected a parse error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).starts_with("cfg.json:4: malformed config"));
    }
    try {
        parse_config("{\n  \"T_m\": 0.1,\n  \"T_m_db\": -10\n}", "cfg.json");
        FAIL("expected a conflict");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("mutually exclusive") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[1, 2]"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"sweep_parameter": "eta"})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"mc_trials": -3})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"alpha_s": 1.5})"), InputError);
}

TEST_CASE("overrides") {
    RunConfig c;
    apply_overrides(c, {"B_s_db=30", "modes=[\"IBFD\",\"FDD\"]", "sweep_parameter=eta", "density=mixed-partial"});
    CHECK(c.spec.base_params.B_s == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(c.spec.modes.size() == 2);
    CHECK(c.spec.swept_parameter == experiments::SweptParameter::Eta);
    CHECK_THROWS_AS(apply_overrides(c, {"novalue"}), InputError);
    CHECK_THROWS_AS(apply_overrides(c, {"eta=7"}), InputError);
}

TEST_CASE("numbers are written in round-trip precision") {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-300, 158.48931924611142, -0.0}) {
        const std::string s = format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
}

TEST_CASE("cli: coverage at unreachable thresholds") {
    const Result r = run_cli("coverage --param T_s=1e9 --param T_b=1e9 --param T_m=1e9 --mode FDD");
    CHECK(r.code == kExitOk);
    CHECK(first_line(r.out) == kCsvHeader);
    const std::size_t pos = r.out.find(",FDD,p_total,");
    REQUIRE(pos != std::string::npos);
    const std::string rest = r.out.substr(pos + 13);
    const double v = std::stod(rest.substr(0, rest.find(',')));
    CHECK(v <= 1e-3);
}

TEST_CASE("cli: exit codes") {
    CHECK(run_cli("").code == kExitInput);
    CHECK(run_cli("coverage --param nonsense=1").code == kExitInput);
    CHECK(run_cli("figure fig99").code == kExitInput);
    CHECK(run_cli("sweep").code == kExitInput);
    CHECK(run_cli("coverage --threads 1", "HETNET_THREADS=abc").code == kExitOk);
    CHECK(run_cli("coverage --mode FDD", "HETNET_THREADS=abc").code == kExitInput);
    CHECK(run_cli("--help").code == kExitOk);

    const std::string bad = write_file("bad.json", "{\n  \"lambda_s\": 4,\n  \"nope\": true\n}\n");
    const Result r = run_cli("coverage --config " + bad);
    CHECK(r.code == kExitInput);
    CHECK(r.err.find("bad.json:3:") != std::string::npos);

    const Result none = run_cli("rate --mode FDD --param T_s=1e300 --param T_b=1e300 --param T_m=1e300");
    CHECK(none.code == kExitNumerical);
    CHECK(first_line(none.out) == kCsvHeader);
}

TEST_CASE("cli: simulate is reproducible for a fixed seed") {
    const std::string args = "simulate --mode FDD --seed 42 --mc-trials 300";
    const Result a = run_cli(args);
    const Result b = run_cli(args + " --threads 3");
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find(",300,") != std::string::npos);
    CHECK(run_cli("simulate --mode FDD --seed 43 --mc-trials 300").out != a.out);
}

TEST_CASE("cli: sweep from a config file, written to --out") {
    const std::string cfg = write_file("sweep.json", R"({
  "name": "bias",
  "sweep_parameter": "B_s",
  "grid": [10, 30],
  "P_m_db": 22,
  "T_s_db": -10, "T_b_db": -10, "T_m_db": -10,
  "modes": ["FDD"],
  "outputs": ["coverage_total", "topology"]
})");
    const std::string out = (scratch() / "sweep.csv").string();
    const Result r = run_cli("sweep --config " + cfg + " --out " + out);
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(out);
    std::string line;
    int rows = 0;
    std::getline(in, line);
    CHECK(line == kCsvHeader);
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 * 5);

    const std::string no_grid = write_file("nogrid.json", R"({"B_s_db": 20})");
    CHECK(run_cli("sweep --config " + no_grid).code == kExitInput);
}
