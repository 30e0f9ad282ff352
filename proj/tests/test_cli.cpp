#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <regex>
#include <string>

#include <json.hpp>

#include "mmlab/report.hpp"

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const char* bin = std::getenv("MMLAB_BIN");
    REQUIRE(bin != nullptr);
    std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string strip_runtime(std::string s) {
    return std::regex_replace(s, std::regex("\"runtime_ms\": *[0-9]+"), "\"runtime_ms\": 0");
}

}  // namespace

TEST_CASE("compute: a monomial has measure zero (exit 0)") {
    auto r = run("compute x --method jensen --report json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["lhs_estimate"].get<double>()) < 1e-12);
    CHECK(j["method"] == "jensen");
    CHECK(j.contains("n_samples"));
    CHECK_FALSE(j.contains("rhs_value"));
}

TEST_CASE("compute: the two-variable identity value") {
    auto r = run("compute 1+x+y --method jensen --report json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["lhs_estimate"].get<double>() - 0.3230659472) < 1e-6);
}

TEST_CASE("compute: family member without a closed form runs as smoke") {
    auto r = run("compute \"z*(1+x1)*(1+x2)-(1-x1)*(1-x2)\" --samples 4096 --report json");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::isfinite(j["lhs_estimate"].get<double>()));
}

TEST_CASE("compute: parse error exits 2") {
    auto r = run("compute \"1.5*x\"");
    CHECK(r.exit_code == 2);
    auto s = run("compute \"x + \"");
    CHECK(s.exit_code == 2);
}

TEST_CASE("compute: JSON output is deterministic for a fixed seed") {
    std::string args = "compute \"1+x+y\" --method direct --samples 4096 --seed 7 --report json";
    auto a = run(args);
    auto b = run(args);
    CHECK(a.exit_code == 0);
    CHECK(strip_runtime(a.out) == strip_runtime(b.out));
    auto c = run("compute \"1+x+y\" --method direct --samples 4096 --seed 8 --report json");
    CHECK(strip_runtime(a.out) != strip_runtime(c.out));
}

TEST_CASE("verify: the fast identity passes (exit 0)") {
    auto r = run("verify smyth --report json");
    CHECK(r.exit_code == 0);
    auto arr = nlohmann::json::parse(r.out);
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 1);
    CHECK(arr[0]["pass"] == true);
    CHECK(arr[0]["identity_id"] == "smyth");
    double diff = arr[0]["abs_diff"].get<double>();
    CHECK(diff < 1e-6);
}

TEST_CASE("verify: unknown id exits 2") {
    auto r = run("verify no_such_identity");
    CHECK(r.exit_code == 2);
}

TEST_CASE("verify: an unreachable tolerance reports a failure (exit 1)") {
    // coarse sampling with a tolerance far below the discretization error
    auto r = run("verify res11 --samples 1024 --replications 2 --tol 1e-12 --seed 5");
    CHECK(r.exit_code == 1);
}

TEST_CASE("forms check suites run from the CLI") {
    auto r = run("forms check --suite stokes --seed 3");
    CHECK(r.exit_code == 0);
    auto bad = run("forms check --suite nonsense");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("list-identities") {
    auto r = run("list-identities --report json");
    CHECK(r.exit_code == 0);
    auto arr = nlohmann::json::parse(r.out);
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 5);
    bool has_smyth = false, has_det3 = false;
    for (const auto& j : arr) {
        if (j["id"] == "smyth") has_smyth = true;
        if (j["id"] == "det3") has_det3 = true;
        CHECK(j.contains("rhs_value"));
        CHECK(j.contains("tolerance"));
    }
    CHECK(has_smyth);
    CHECK(has_det3);
}
