#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

using nlohmann::json;

namespace {

struct RunResult {
    int rc = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& tag) {
    return "/tmp/deltawall_cli_" + std::to_string(getpid()) + "_" + tag;
}

// Run the installed binary with the given argument string.
RunResult run(const std::string& args) {
    std::string out_file = temp_path("out");
    std::string err_file = temp_path("err");
    std::string cmd = std::string(CLI_BINARY) + " " + args + " > " + out_file +
                      " 2> " + err_file;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return r;
}

} // namespace

TEST_CASE("spectrum subcommand emits well-formed json") {
    auto r = run("spectrum --g 2.0 --x 0.41");
    REQUIRE(r.rc == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["kind"] == "spectrum");
    CHECK(doc["well"]["length"] == 1.0);
    REQUIRE(doc["levels"].size() == 6);
    double prev = -1e300;
    for (const auto& lv : doc["levels"]) {
        double e = lv["energy"].get<double>();
        CHECK(e > prev);
        prev = e;
        CHECK(lv["branch"] == "oscillatory");
    }

    auto narrowed = run("spectrum --g 2.0 --x 0.41 --n-max 3");
    CHECK(json::parse(narrowed.out)["levels"].size() == 3);
}

TEST_CASE("byte-identical reruns") {
    std::string args = "trace --cycle cx --x0 0.41 --x1 0.59 --n-max 4 --steps 32";
    auto a = run(args);
    auto b = run(args);
    REQUIRE(a.rc == 0);
    CHECK(a.out == b.out);

    auto c = run("spectrum --g -15.3 --x 0.27");
    auto d = run("spectrum --g -15.3 --x 0.27");
    REQUIRE(c.rc == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("csv and json carry the same numbers") {
    auto j = run("spectrum --g 3.7 --x 0.31");
    auto c = run("spectrum --g 3.7 --x 0.31 --format csv");
    REQUIRE(j.rc == 0);
    REQUIRE(c.rc == 0);

    auto doc = json::parse(j.out);
    std::istringstream lines(c.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,energy,energy_over_estar,branch,wavenumber,side,exceptional");
    for (const auto& lv : doc["levels"]) {
        std::string line;
        REQUIRE(std::getline(lines, line));
        std::istringstream fields(line);
        std::string n_str, e_str;
        std::getline(fields, n_str, ',');
        std::getline(fields, e_str, ',');
        CHECK(std::stoi(n_str) == lv["n"].get<int>());
        // Shortest round-trip printing makes the comparison exact.
        CHECK(std::strtod(e_str.c_str(), nullptr) == lv["energy"].get<double>());
    }
}

TEST_CASE("output file matches stdout payload") {
    std::string path = temp_path("artifact.json");
    auto direct = run("spectrum --g 1.0 --x 0.45");
    auto filed = run("spectrum --g 1.0 --x 0.45 --output " + path);
    REQUIRE(direct.rc == 0);
    REQUIRE(filed.rc == 0);
    CHECK(slurp(path) == direct.out);
    std::remove(path.c_str());

    // With --output the trace subcommand still reports the permutation on
    // stdout for interactive use.
    std::string tpath = temp_path("trace.json");
    auto traced = run("trace --cycle cx --x0 0.41 --x1 0.59 --output " + tpath);
    REQUIRE(traced.rc == 0);
    CHECK(traced.out.find("permutation: (1 2)(3 4)") != std::string::npos);
    auto doc = json::parse(slurp(tpath));
    CHECK(doc["permutation"] == "(1 2)(3 4)");
    CHECK(doc["holonomy"]["1"] == 2);
    CHECK(doc["holonomy"]["2"] == 1);
    std::remove(tpath.c_str());
}

TEST_CASE("symbolic strengths cross the text boundary") {
    auto plus = run("spectrum --g inf --x 0.41");
    REQUIRE(plus.rc == 0);
    auto pd = json::parse(plus.out);
    CHECK(pd["levels"][0]["side"] == "R1");
    CHECK(pd["wall"]["g_or_inf"] == "inf");

    auto minus = run("spectrum --g -inf --x 0.41 --n-max 3");
    REQUIRE(minus.rc == 0);
    auto md = json::parse(minus.out);
    CHECK(md["levels"][0]["energy"] == "-inf");
    CHECK(md["levels"][1]["side"] == "R1");
}

TEST_CASE("trace json layout") {
    auto r = run("trace --cycle cy --x0 0.41 --n-max 4 --steps 32");
    REQUIRE(r.rc == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["kind"] == "trace");
    CHECK(doc["permutation"].is_null());  // partial map has no permutation
    CHECK(doc["holonomy"]["1"] == 2);
    CHECK(doc["holonomy"]["4"] == "exit");
    REQUIRE(doc["samples"].size() == 2u * 33 + 2);
    const auto& flip_in = doc["samples"][33];
    CHECK(flip_in["g_or_inf"] == "inf");
    CHECK(doc["samples"][34]["g_or_inf"] == "-inf");
    REQUIRE(doc["events"].is_array());
    CHECK(doc["events"].empty());

    auto inv = run("trace --cycle cy --x0 0.41 --inverse --n-max 4 --steps 32");
    auto idoc = json::parse(inv.out);
    CHECK(idoc["holonomy"]["1"] == "-inf");
    CHECK(idoc["holonomy"]["2"] == 1);
}

TEST_CASE("plan subcommand") {
    auto r = run("plan --from 1 --to 3");
    REQUIRE(r.rc == 0);
    auto doc = json::parse(r.out);
    CHECK(doc["source"] == 1);
    CHECK(doc["target"] == 3);
    REQUIRE(doc["cycles"].size() == 2);
    CHECK(doc["composed_holonomy"]["1"] == 3);
    // A spectator level can leave the examined window mid-plan, in which
    // case the composed relabeling is reported as a partial map only.
    if (!doc["composed_permutation"].is_null())
        CHECK(doc["composed_permutation"].get<std::string>().find('3') !=
              std::string::npos);

    auto same = run("plan --from 2 --to 2");
    auto sdoc = json::parse(same.out);
    CHECK(sdoc["cycles"].empty());
    CHECK(sdoc["composed_permutation"] == "id");
}

TEST_CASE("evolve subcommand emits a fidelity table") {
    auto r = run("evolve --cycle cx --x0 0.41 --x1 0.59 --T 0.2 --dt 0.005 "
                 "--grid 64 --n-max 2 --record-stride 10 --format csv");
    REQUIRE(r.rc == 0);
    std::istringstream lines(r.out);
    std::string header;
    REQUIRE(std::getline(lines, header));
    CHECK(header == "t,fidelity_1,fidelity_2");
    int rows = 0;
    std::string line;
    double last_t = -1.0;
    while (std::getline(lines, line)) {
        ++rows;
        double t = std::strtod(line.c_str(), nullptr);
        CHECK(t > last_t);
        last_t = t;
    }
    CHECK(rows == 5);  // 0, 10 dt, 20 dt, 30 dt, final
    CHECK(last_t == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("exit codes distinguish user errors from runtime failures") {
    CHECK(run("--help").rc == 0);
    CHECK(run("spectrum --help").rc == 0);

    CHECK(run("spectrum --g 1.0").rc == 2);              // missing --x
    CHECK(run("spectrum --g 1.0 --x 1.5").rc == 2);      // outside the box
    CHECK(run("spectrum --g nonsense --x 0.4").rc == 2); // unparsable strength
    CHECK(run("spectrum --g 1.0 --x 0.4 --bogus").rc == 2);
    CHECK(run("frobnicate").rc == 2);
    CHECK(run("trace --cycle cx --x0 0.41").rc == 2);    // cx needs --x1
    CHECK(run("trace --cycle cy --x0 0.41 --x1 0.6").rc == 2);
    CHECK(run("trace --cycle cx --x0 0.5 --x1 0.6").rc == 2);  // node at x0
    CHECK(run("plan --from 0 --to 3").rc == 2);
    CHECK(run("evolve --cycle cx --x0 0.41 --x1 0.59 --T 0.1 --record-stride 0").rc == 2);

    // Failures past argument checking surface as a distinct code.
    CHECK(run("spectrum --g 1.0 --x 0.4 --output /nonexistent_dir/out.json").rc == 3);
}
