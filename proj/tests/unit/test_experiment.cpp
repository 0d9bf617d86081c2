#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "error.hpp"
#include "experiment.hpp"

using namespace pctv;
using nlohmann::json;

namespace {

std::string config_error(std::string_view name, std::string_view cfg) {
    try {
        experiment::run(name, cfg, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        return e.what();
    }
    FAIL("expected a config error");
    return {};
}

std::size_t lines(const std::string& csv) {
    std::size_t n = 0;
    for (std::size_t p = 0; (p = csv.find("\r\n", p)) != std::string::npos; p += 2) ++n;
    return n;
}

}  // namespace

TEST_CASE("experiment names") {
    const auto& n = experiment::names();
    CHECK(n.size() == 7);
    CHECK(n.front() == "gtv-convergence");
    CHECK(n.back() == "bisect");
}

TEST_CASE("config errors carry JSON pointers") {
    CHECK(config_error("gtv-convergence", "{").rfind("(root)", 0) == 0);
    CHECK(config_error("gtv-convergence", "[]").rfind("(root)", 0) == 0);
    CHECK(config_error("gtv-convergence", R"({"eps": {"rule": "bogus"}})").rfind("/eps/rule", 0) == 0);
    CHECK(config_error("gtv-convergence", R"({"eps": [{"rule": "fixed", "value": 0.1}, {"rule": "fixed", "value": -1}]})")
              .rfind("/eps/1/value", 0) == 0);
    CHECK(config_error("gtv-convergence", R"({"n": [100, "x"]})").rfind("/n/1", 0) == 0);
    CHECK(config_error("gtv-convergence", R"({"kernel": {"name": "indicator", "radius": 0}})").rfind("/kernel/radius", 0) ==
          0);
    CHECK(config_error("gtv-convergence", R"({"bogus": 1})").rfind("/bogus", 0) == 0);
    CHECK(config_error("bisect", R"({"n": [11]})").rfind("/n/0", 0) == 0);
    CHECK(config_error("matching-scaling", R"({"n": [10]})").rfind("/n/0", 0) == 0);
    CHECK_THROWS_AS(experiment::run("nope", "{}", 1), Error);
}

TEST_CASE("empty n schedule is a no-op") {
    const auto a = experiment::run("matching-scaling", R"({"n": []})", 1);
    CHECK(a.csv == "n,d,seed,dist,ratio\r\n");
    const auto g = experiment::run("gtv-convergence", R"({"n": []})", 1);
    CHECK(lines(g.csv) == 1);
    CHECK(json::parse(g.summary_json)["groups"].empty());
}

TEST_CASE("gtv-convergence rows and summary") {
    const char* cfg = R"({"n": [300, 600], "seeds": [1, 2, 3], "eps": {"rule": "fixed", "value": 0.15}})";
    const auto a = experiment::run("gtv-convergence", cfg, 2);
    CHECK(lines(a.csv) == 1 + 6);
    CHECK(a.csv.rfind("eps_rule,n,d,eps,seed,kernel,domain,density,gtv,limit,rel_error\r\n", 0) == 0);
    const auto s = json::parse(a.summary_json);
    CHECK(s["experiment"] == "gtv-convergence");
    CHECK(s["rng"]["name"] == "xoshiro256ss-splitmix64");
    CHECK(s["config"]["kernel"]["name"] == "indicator");
    CHECK(s["limit"]["value"].get<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    CHECK(s["groups"].size() == 2);
    CHECK(!a.svg.empty());
}

TEST_CASE("runs are reproducible and independent of worker count") {
    const char* cfg = R"({"n": [400], "seeds": [0, 1, 2, 3], "eps": [{"rule": "borderline", "c": 2}, {"rule": "admissible"}]})";
    const auto a = experiment::run("perimeter-convergence", cfg, 1);
    const auto b = experiment::run("perimeter-convergence", cfg, 3);
    CHECK(a.csv == b.csv);
    CHECK(a.summary_json == b.summary_json);
    const auto m1 = experiment::run("matching-scaling", R"({"n": [64, 256], "seeds": [0, 1]})", 1);
    const auto m2 = experiment::run("matching-scaling", R"({"n": [64, 256], "seeds": [0, 1]})", 2);
    CHECK(m1.csv == m2.csv);
}

TEST_CASE("other experiments run on small configs") {
    auto c = experiment::run("connectivity",
                             R"({"n": [500], "seeds": [0, 1], "eps": [{"rule": "sub-connectivity", "lambda": 0.3},
                                 {"rule": "sub-connectivity", "lambda": 3}]})",
                             1);
    CHECK(lines(c.csv) == 5);
    auto s = json::parse(c.summary_json);
    CHECK(s["groups"][0]["connected_fraction"].get<double>() == 0.0);
    CHECK(s["groups"][1]["connected_fraction"].get<double>() == 1.0);

    auto t = experiment::run("tl-distance", R"({"n": [100, 200], "seeds": [0], "grid": 8})", 1);
    CHECK(lines(t.csv) == 3);

    auto nl = experiment::run("nonlocal-convergence", R"({"eps": [{"rule": "fixed", "value": 0.16}]})", 1);
    CHECK(lines(nl.csv) == 2);

    auto b = experiment::run("bisect", R"({"n": [100], "seeds": [0], "eps": [{"rule": "fixed", "value": 0.3}], "restarts": 2, "tl1_grid": 8})", 1);
    CHECK(lines(b.csv) == 2);
    s = json::parse(b.summary_json);
    CHECK(s["runs"].size() == 1);
    CHECK(s["runs"][0].contains("agreement"));
    CHECK(b.svg.find("<svg") != std::string::npos);
}

TEST_CASE("write_artifacts") {
    const auto dir = std::filesystem::temp_directory_path() / "pctv_unit_artifacts";
    std::filesystem::remove_all(dir);
    const auto a = experiment::run("matching-scaling", R"({"n": [16], "seeds": [0]})", 1);
    experiment::write_artifacts("matching-scaling", a, dir.string());
    std::ifstream f(dir / "matching-scaling.csv", std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == a.csv);
    CHECK(std::filesystem::exists(dir / "matching-scaling.json"));
    // A regular file where the directory should be.
    const auto blocker = dir / "file";
    std::ofstream(blocker) << "x";
    CHECK_THROWS_AS(experiment::write_artifacts("matching-scaling", a, (blocker / "sub").string()), Error);
    std::filesystem::remove_all(dir);
}
