#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "coag/commands.hpp"
#include "coag/config.hpp"
#include "coag/io.hpp"
#include "coag/solver.hpp"

using namespace coag;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base_config() {
    return json{{"kernel", {{"name", "constant"}, {"params", {{"value", 1.0}}}}},
                {"truncation", {{"n", 100.0}, {"theta", 1}}},
                {"grid", {{"min_volume", 1e-3}, {"max_volume", 100.0}, {"cells", 80}}},
                {"initial", {{"type", "exponential"}, {"amplitude", 1.0}, {"rate", 1.0}}},
                {"horizon", 0.2},
                {"time", {{"method", "rk4"}, {"dt", 0.002}}},
                {"snapshots", {{"stride", 25}}},
                {"threads", 1}};
}

void expect_reject(const json& j, const char* label) {
    CAPTURE(label);
    CHECK_THROWS_AS(parse_config(j.dump(), "inline"), ConfigError);
}

}  // namespace

TEST_CASE("config parsing happy path") {
    RunConfig cfg = parse_config(base_config().dump(), "inline");
    CHECK(cfg.kernel.name() == "constant");
    CHECK(cfg.trunc.n == 100.0);
    CHECK(cfg.trunc.theta == 1);
    CHECK(cfg.grid.min_volume == 1e-3);
    CHECK(cfg.grid.max_volume == 100.0);
    CHECK(cfg.grid.cells == 80);
    CHECK(cfg.initial.kind() == InitialDensity::Kind::exponential);
    CHECK(cfg.horizon == 0.2);
    CHECK(cfg.time.method == TimePolicy::Method::rk4);
    CHECK(cfg.time.dt == 0.002);
    CHECK(cfg.snapshots.stride == 25);
    CHECK(cfg.threads == 1);
    CHECK(cfg.config_hash == config_fingerprint(cfg));
}

TEST_CASE("config fingerprint") {
    RunConfig cfg = parse_config(base_config().dump(), "inline");
    std::string fp = config_fingerprint(cfg);
    CHECK(fp.size() == 16);
    CHECK(fp.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_fingerprint(cfg) == fp);  // pure function of the config

    RunConfig other = cfg;
    other.time.dt = 0.004;
    CHECK(config_fingerprint(other) != fp);

    RunConfig threaded = cfg;
    threaded.threads = 7;  // thread count never changes the problem
    CHECK(config_fingerprint(threaded) == fp);

    // regression pin for the canonical serialization
    CHECK(fp == "0ba554cdab878a02");
}

TEST_CASE("malformed configs are rejected") {
    json j = base_config();
    j["tim"] = j["time"];
    j.erase("time");
    expect_reject(j, "unknown top-level key");

    j = base_config();
    j.erase("kernel");
    expect_reject(j, "missing kernel");

    j = base_config();
    j["kernel"]["name"] = "warp";
    expect_reject(j, "unknown kernel name");

    j = base_config();
    j["truncation"]["n"] = 1.0;
    expect_reject(j, "truncation level too small");

    j = base_config();
    j["truncation"]["theta"] = 2;
    expect_reject(j, "theta outside {0,1}");

    j = base_config();
    j["grid"]["cells"] = 1;
    expect_reject(j, "too few cells");

    j = base_config();
    j["grid"]["cells"] = 2.5;
    expect_reject(j, "non-integer cells");

    j = base_config();
    j["grid"]["min_vol"] = 1e-3;
    expect_reject(j, "unknown nested key");

    j = base_config();
    j["horizon"] = 0.0;
    expect_reject(j, "zero horizon");

    j = base_config();
    j["time"]["dt"] = -0.001;
    expect_reject(j, "negative dt");

    j = base_config();
    j["time"]["rel_tol"] = 0.0;
    expect_reject(j, "zero rel_tol");

    j = base_config();
    j["time"]["dt_min_factor"] = 1.0;
    expect_reject(j, "dt_min_factor at 1");

    j = base_config();
    j["snapshots"]["times"] = {0.5};
    expect_reject(j, "snapshot time past horizon");

    j = base_config();
    j["threads"] = 0;
    expect_reject(j, "threads below 1");

    j = base_config();
    j["truncation"]["n"] = "big";
    expect_reject(j, "n is not a number");

    j = base_config();
    j["initial"] = {{"type", "gamma"}};
    expect_reject(j, "unknown initial type");

    j = base_config();
    j["initial"] = {{"type", "tabulated"}, {"samples", {{1.0, 1.0}}}};
    expect_reject(j, "single tabulated sample");

    j = base_config();
    j["initial"] = {{"type", "tabulated"}, {"samples", {{2.0, 1.0}, {1.0, 1.0}}}};
    expect_reject(j, "unsorted tabulated samples");

    j = base_config();
    j["initial"] = {{"type", "tabulated"}, {"samples", {{1.0}, {2.0, 2.0}}}};
    expect_reject(j, "malformed sample pair");

    CHECK_THROWS_AS(parse_config("[1, 2]", "inline"), ConfigError);
    CHECK_THROWS_AS(parse_config("{ nope", "inline"), ConfigError);
    CHECK_THROWS_AS(load_config("/definitely/not/here.json"), ConfigError);
}

TEST_CASE("float formatting round-trips bitwise") {
    for (double v : {1.0 / 3.0, 1e-300, 123456789.123456789, 5e-324, 0.1, 2.0, -7.25}) {
        double back = std::strtod(format_double(v).c_str(), nullptr);
        CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    }
}

TEST_CASE("run bundle round-trips bit-exactly") {
    fs::path tmp = fs::temp_directory_path() / "coag_io_roundtrip";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    fs::path cfg_path = tmp / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << base_config().dump(2) << '\n';
    }
    fs::path out_dir = tmp / "bundle";

    REQUIRE(run_command(cfg_path.string(), out_dir.string(), 1) == exit_ok);
    CHECK(fs::exists(out_dir / "moments.csv"));
    CHECK(fs::exists(out_dir / "snapshots.csv"));
    CHECK(fs::exists(out_dir / "report.json"));

    Trajectory loaded = load_trajectory(out_dir.string());
    Trajectory direct = run(load_config(cfg_path.string()));

    CHECK(loaded.config_hash == direct.config_hash);
    REQUIRE(loaded.snapshots.size() == direct.snapshots.size());
    for (std::size_t s = 0; s < loaded.snapshots.size(); ++s) {
        CHECK(loaded.snapshots[s].time == direct.snapshots[s].time);
        REQUIRE(loaded.snapshots[s].values.size() == direct.snapshots[s].values.size());
        for (std::size_t i = 0; i < loaded.snapshots[s].values.size(); ++i)
            CHECK(loaded.snapshots[s].values[i] == direct.snapshots[s].values[i]);
    }
    REQUIRE(loaded.moments.size() == direct.moments.size());
    for (std::size_t r = 0; r < loaded.moments.size(); ++r) {
        CHECK(loaded.moments[r].t == direct.moments[r].t);
        CHECK(loaded.moments[r].m_neg2b == direct.moments[r].m_neg2b);
        CHECK(loaded.moments[r].m_negb == direct.moments[r].m_negb);
        CHECK(loaded.moments[r].m0 == direct.moments[r].m0);
        CHECK(loaded.moments[r].m1 == direct.moments[r].m1);
        CHECK(loaded.moments[r].m2 == direct.moments[r].m2);
        CHECK(loaded.moments[r].loss == direct.moments[r].loss);
    }

    fs::path empty = tmp / "empty";
    fs::create_directories(empty);
    CHECK_THROWS_AS(load_trajectory(empty.string()), std::runtime_error);

    fs::remove_all(tmp);
}
