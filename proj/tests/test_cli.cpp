#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clup/cli.hpp"

using namespace clup;

namespace {

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"clup"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("unknown subcommand and bad usage exit with code 1") {
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"theory-curve", "--branch", "sideways"}) == 1);
}

TEST_CASE("glitch subcommand locates the transition") {
    CHECK(run_cli({"glitch", "--alpha", "0.6", "--output", "cli_glitch.txt"}) ==
          0);
    std::string out = slurp("cli_glitch.txt");
    CHECK(out.find("14.3") != std::string::npos);
    std::remove("cli_glitch.txt");
}

TEST_CASE("theory-curve writes a CSV grid") {
    CHECK(run_cli({"theory-curve", "--alpha", "0.6", "--lo", "13", "--hi",
                   "15", "--step", "1", "--format", "csv", "--output",
                   "cli_curve.csv"}) == 0);
    std::string out = slurp("cli_curve.csv");
    CHECK(out.find("snr_db") != std::string::npos);
    // 3 grid points plus header
    int lines = 0;
    for (char c : out)
        if (c == '\n') ++lines;
    CHECK(lines >= 4);
    std::remove("cli_curve.csv");
}

TEST_CASE("stationary subcommand reports multiple stationary points") {
    CHECK(run_cli({"stationary", "--alpha", "0.6", "--snr", "13", "--output",
                   "cli_stat.txt"}) == 0);
    std::string out = slurp("cli_stat.txt");
    CHECK(out.find("c1") != std::string::npos);
    std::remove("cli_stat.txt");
}

TEST_CASE("tables subcommand dumps the bundled rows") {
    CHECK(run_cli({"tables", "--table", "3", "--output", "cli_tables.txt"}) ==
          0);
    std::string out = slurp("cli_tables.txt");
    CHECK(out.find("0.99992") != std::string::npos);
    CHECK(out.find("target") != std::string::npos);
    std::remove("cli_tables.txt");
}

TEST_CASE("run subcommand executes a single instance") {
    CHECK(run_cli({"run", "--algorithm", "clup_r0", "--n", "200", "--snr",
                   "15", "--seed", "3", "--output", "cli_run.txt"}) == 0);
    std::string out = slurp("cli_run.txt");
    CHECK(out.find("p_err") != std::string::npos);
    std::remove("cli_run.txt");
}

TEST_CASE("sweep subcommand: missing config exits 1, valid config runs") {
    CHECK(run_cli({"sweep", "cli_missing_config.json"}) == 1);
    {
        std::ofstream out("cli_sweep_cfg.json");
        out << R"({"alpha":0.6,"n":200,"snr_grid_db":[15.0],)"
            << R"("algorithms":["clup_r0"],"trials":2,"base_seed":5,)"
            << R"("output_path":"cli_sweep_out.json"})";
    }
    CHECK(run_cli({"sweep", "cli_sweep_cfg.json"}) == 0);
    std::string csv = slurp("cli_sweep_out.csv");
    CHECK(csv.find("clup_r0") != std::string::npos);
    std::remove("cli_sweep_cfg.json");
    std::remove("cli_sweep_out.json");
    std::remove("cli_sweep_out.csv");
}
