#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "hess2/app.hpp"
#include "hess2/errors.hpp"

using namespace hess2;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hess2-unit-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("config text round trip") {
    RunConfig c;
    c.f = "sin(y1) + p2*u";
    c.mode = TauMode::Nonconvex;
    c.n = 21;
    c.stop_tol = 3e-12;
    c.eps_initial = 0.1 / 3;
    c.emit_fields = true;
    RunConfig d;
    d.apply_text(c.to_text());
    CHECK(d.to_text() == c.to_text());
    CHECK(d.eps_initial == c.eps_initial);
    CHECK(d.f == c.f);

    RunConfig e;
    e.apply_text("# comment\n  n = 17  \nmode=convex # trailing\n\n");
    CHECK(e.n == 17);
    CHECK(e.mode == TauMode::Convex);
    CHECK_THROWS_AS(e.apply_text("colour = blue"), ConfigError);
    CHECK_THROWS_AS(e.apply_text("n = seventeen"), ConfigError);
    CHECK_THROWS_AS(e.apply_text("just words"), ConfigError);
}

TEST_CASE("config JSON round trip") {
    RunConfig c;
    c.f = "y1";
    c.eps_shrink = 0.3;
    c.threads = 2;
    const RunConfig d = RunConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    CHECK(d.to_text() == c.to_text());
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse("{\"n\": \"x\"}")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse("[1]")), ConfigError);
}

TEST_CASE("config validation ranges") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.n = 16;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.eps_shrink = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.max_outer = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.f = "";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.sample_n = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config files") {
    const fs::path dir = scratch("config");
    std::ofstream(dir / "run.cfg") << "f = y2\nn = 13\n";
    RunConfig c;
    c.apply_file((dir / "run.cfg").string());
    CHECK(c.f == "y2");
    CHECK(c.n == 13);
    std::ofstream(dir / "report.json") << "{\"pass\": true, \"config\": {\"f\": \"u\", \"n\": 11}}";
    RunConfig d;
    d.apply_file((dir / "report.json").string());
    CHECK(d.f == "u");
    CHECK(d.n == 11);
    CHECK_THROWS_AS(d.apply_file((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("exit codes are a total function of outcome and verification") {
    CHECK(exit_code_for(Outcome::Converged, true) == 0);
    CHECK(exit_code_for(Outcome::Converged, false) == 5);
    for (bool pass : {true, false}) {
        CHECK(exit_code_for(Outcome::EpsilonExhausted, pass) == 3);
        CHECK(exit_code_for(Outcome::SolveFailure, pass) == 4);
        CHECK(exit_code_for(Outcome::MaxIterations, pass) == 4);
    }
}

TEST_CASE("tau command") {
    std::ostringstream out, err;
    CHECK(cmd_tau(0.0, TauMode::Auto, out, err) == 0);
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j["values"] == nlohmann::json({2.0, 2.0, -1.0}));
    CHECK(j["sigma"] == nlohmann::json({3.0, 0.0, -4.0}));
    CHECK(j["sigma_reduced"] == nlohmann::json({1.0, 1.0, 4.0}));
    CHECK(j["cone"] == "P2");

    std::ostringstream out2;
    CHECK(cmd_tau(-1.0, TauMode::Auto, out2, err) == 0);
    const Tau ref = tau_negative(-1, 0.5, 0.5);
    const auto j2 = nlohmann::json::parse(out2.str());
    for (int i = 0; i < 3; ++i) CHECK(j2["values"][i].get<double>() == ref.values[i]);

    std::ostringstream out3;
    CHECK(cmd_tau(3.0, TauMode::Convex, out3, err) == 0);
    CHECK(nlohmann::json::parse(out3.str())["values"][0].get<double>() == doctest::Approx(1.0));
    CHECK(cmd_tau(-3.0, TauMode::Convex, out3, err) == 2);
}

TEST_CASE("solve writes its artifacts and reruns reproduce them") {
    const fs::path dir = scratch("solve");
    RunConfig c;
    c.f = "y1";
    c.n = 17;
    c.output_dir = (dir / "a").string();
    c.emit_fields = true;
    std::ostringstream err;
    SolveResult res;
    REQUIRE(cmd_solve(c, err, &res) == 0);
    CHECK(err.str().empty());
    for (const char* f : {"convergence.csv", "report.json", "config.txt", "w.csv", "u-samples.csv"})
        CHECK(fs::exists(dir / "a" / f));
    const auto rep = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    for (const char* key : {"residual_sup", "residual_budget", "residual_pass", "ellipticity_margin_min",
                            "ellipticity_bound", "ellipticity_pass", "convexity", "sign_samples", "tau",
                            "eps", "n", "outcome", "config"})
        CHECK_MESSAGE(rep.contains(key), key);
    CHECK(rep["outcome"] == "Converged");
    CHECK(rep["convexity"] == "one_convex_not_convex");
    CHECK(res.state.has_value());

    // Rerun from the embedded config into a second directory.
    RunConfig again = RunConfig::from_json(rep["config"]);
    again.output_dir = (dir / "b").string();
    REQUIRE(cmd_solve(again, err) == 0);
    CHECK(slurp(dir / "a" / "convergence.csv") == slurp(dir / "b" / "convergence.csv"));

    std::ostringstream vout, verr;
    CHECK(cmd_verify((dir / "a").string(), vout, verr) == 0);
    CHECK(nlohmann::json::parse(vout.str())["pass"] == true);
    CHECK(cmd_verify((dir / "missing").string(), vout, verr) == 2);
}

TEST_CASE("solve error paths") {
    const fs::path dir = scratch("errors");
    RunConfig c;
    c.n = 9;
    c.output_dir = dir.string();
    std::ostringstream err;

    c.f = "1/(y1-y1)";
    CHECK(cmd_solve(c, err) == 2);
    CHECK(err.str().find("division by zero") != std::string::npos);
    CHECK(err.str().find('\n') == err.str().size() - 1);

    c.f = "sin(";
    CHECK(cmd_solve(c, err) == 2);
    c.f = "0";
    c.n = 10;
    CHECK(cmd_solve(c, err) == 2);

    c.n = 9;
    c.f = "1e6*sin(1e4*y1)";
    c.max_eps_halvings = 2;
    CHECK(cmd_solve(c, err) == 3);

    c = {};
    c.n = 17;
    c.output_dir = dir.string();
    c.f = "y1";
    c.max_outer = 1;
    CHECK(cmd_solve(c, err) == 4);
}

TEST_CASE("sweep") {
    RunConfig c;
    c.f = "y1";
    c.n = 17;
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(c, {0.1, 0.05, 0.025, 0.0125}, out, err) == 0);
    CHECK(out.str().rfind("eps,g0_sup,margin\n", 0) == 0);
    const auto rows = parse_csv(out.str());
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][1] / rows[i - 1][1] == doctest::Approx(0.5).epsilon(0.05));
        CHECK(std::abs(rows[i][2] - 1.0) <= 2.0 * rows[i][0]);
    }

    c.f = "0";
    std::ostringstream out0;
    REQUIRE(cmd_sweep(c, {0.1, 0.05}, out0, err) == 0);
    for (const auto& row : parse_csv(out0.str())) CHECK(row[1] == 0.0);
    CHECK(cmd_sweep(c, {}, out0, err) == 2);
    CHECK(cmd_sweep(c, {-0.1}, out0, err) == 2);
}

}  // TEST_SUITE
