#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "coag_cli_test";

int run_shell(const std::string& cmd) {
    int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

int run_cli(const std::string& args) {
    return run_shell(std::string(COAG_CLI_PATH) + " " + args);
}

std::string data_file(const char* name) {
    return (fs::path(COAG_TEST_DATA) / name).string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Workspace {
    Workspace() {
        fs::remove_all(work);
        fs::create_directories(work);
    }
};

std::string out(const char* sub) { return (work / sub).string(); }

}  // namespace

TEST_CASE("argument handling") {
    Workspace ws;
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run") == 2);  // config argument is required
    CHECK(run_cli("run " + out("missing.json")) == 2);
    CHECK(run_cli("run " + data_file("bad_unknown_key.json")) == 2);
    CHECK(run_cli("compare " + out("nowhere") + " --oracle constant-exact") == 2);
}

TEST_CASE("run bundles are deterministic") {
    Workspace ws;
    std::string cfg = data_file("run_small.json");
    REQUIRE(run_cli("run " + cfg + " -o " + out("a")) == 0);
    CHECK(fs::exists(work / "a" / "moments.csv"));
    CHECK(fs::exists(work / "a" / "snapshots.csv"));
    CHECK(fs::exists(work / "a" / "report.json"));

    // identical invocation: every byte matches
    REQUIRE(run_cli("run " + cfg + " -o " + out("b")) == 0);
    CHECK(slurp(work / "a" / "moments.csv") == slurp(work / "b" / "moments.csv"));
    CHECK(slurp(work / "a" / "snapshots.csv") == slurp(work / "b" / "snapshots.csv"));
    CHECK(slurp(work / "a" / "report.json") == slurp(work / "b" / "report.json"));

    // thread count must not change the numbers (report.json records it, so
    // only the numeric files are compared)
    REQUIRE(run_shell("COAG_THREADS=4 " + std::string(COAG_CLI_PATH) + " run " + cfg + " -o " +
                      out("c")) == 0);
    CHECK(slurp(work / "a" / "moments.csv") == slurp(work / "c" / "moments.csv"));
    CHECK(slurp(work / "a" / "snapshots.csv") == slurp(work / "c" / "snapshots.csv"));

    REQUIRE(run_cli("--threads 4 run " + cfg + " -o " + out("d")) == 0);
    CHECK(slurp(work / "a" / "moments.csv") == slurp(work / "d" / "moments.csv"));

    // unparsable COAG_THREADS falls back to one worker
    CHECK(run_shell("COAG_THREADS=abc " + std::string(COAG_CLI_PATH) + " run " + cfg + " -o " +
                    out("e")) == 0);
    CHECK(slurp(work / "a" / "moments.csv") == slurp(work / "e" / "moments.csv"));
}

TEST_CASE("escape runs publish their ledger in the report") {
    Workspace ws;
    REQUIRE(run_cli("run " + data_file("run_escape.json") + " -o " + out("esc")) == 0);
    json rep = json::parse(slurp(work / "esc" / "report.json"));
    CHECK(rep["truncation"]["theta"].get<int>() == 0);
    CHECK(rep["mass_ledger"]["final_loss"].get<double>() > 0.0);
    CHECK(rep["mass_ledger"]["drift_rel"].get<double>() <= 1e-12);
    CHECK(rep["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("stiff problems exit with the numerical code") {
    Workspace ws;
    json j{{"kernel", {{"name", "multiplicative"}}},
           {"truncation", {{"n", 100.0}, {"theta", 0}}},
           {"grid", {{"min_volume", 1e-2}, {"max_volume", 100.0}, {"cells", 80}}},
           {"initial", {{"type", "exponential"}}},
           {"horizon", 1.0},
           {"time", {{"dt", 0.5}, {"dt_min_factor", 0.9}}}};
    fs::path cfg = work / "stiff.json";
    {
        std::ofstream f(cfg);
        f << j.dump(2) << '\n';
    }
    CHECK(run_cli("run " + cfg.string() + " -o " + out("stiff_out")) == 3);
}

TEST_CASE("compare writes oracle error tables") {
    Workspace ws;
    REQUIRE(run_cli("run " + data_file("run_small.json") + " -o " + out("bundle")) == 0);

    CHECK(run_cli("compare " + out("bundle") + " --oracle constant-exact -o " +
                  out("cmp.csv")) == 0);
    std::string csv = slurp(work / "cmp.csv");
    CHECK(csv.rfind("t,l1_density_error,m0_rel_error,m1_rel_error,m2_rel_error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);

    CHECK(run_cli("compare " + out("bundle") + " --oracle dir:" + out("bundle") + " -o " +
                  out("self.csv")) == 0);
    CHECK(run_cli("compare " + out("bundle") + " --oracle moments:bogus -o " +
                  out("bad.csv")) == 2);
}

TEST_CASE("study sweeps truncation levels with both theta values") {
    Workspace ws;
    REQUIRE(run_cli("study " + data_file("run_small.json") + " --n 5,25 -o " +
                    out("study")) == 0);
    CHECK(fs::exists(work / "study" / "study.csv"));
    CHECK(fs::exists(work / "study" / "study.json"));
    for (const char* sub : {"n5_theta0", "n5_theta1", "n25_theta0", "n25_theta1"})
        CHECK(fs::exists(work / "study" / sub / "moments.csv"));

    json study = json::parse(slurp(work / "study" / "study.json"));
    REQUIRE(study["rows"].size() == 4);
    for (const auto& row : study["rows"]) {
        CHECK(row["mass_drift_rel"].get<double>() <= 1e-10);
        if (row["theta"].get<int>() == 1) CHECK(row["final_loss"].get<double>() == 0.0);
    }
    // the finest level is its own reference
    CHECK(study["rows"].back()["l1_to_finest"].get<double>() == 0.0);
}

TEST_CASE("kernel audit reports hypothesis violations through the exit code") {
    Workspace ws;
    CHECK(run_cli("audit-kernel " + data_file("run_small.json") + " -o " +
                  out("audit_ok.json")) == 0);
    json ok = json::parse(slurp(work / "audit_ok.json"));
    CHECK(ok["pass"].get<bool>());
    CHECK(ok["report"]["envelope_holds"].get<bool>());

    CHECK(run_cli("audit-kernel " + data_file("audit_multiplicative.json") + " -o " +
                  out("audit_bad.json")) == 3);
    json bad = json::parse(slurp(work / "audit_bad.json"));
    CHECK(!bad["pass"].get<bool>());
    CHECK(!bad["kernel"]["satisfies_growth"].get<bool>());
}
