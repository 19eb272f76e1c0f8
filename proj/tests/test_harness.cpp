#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "clup/errors.hpp"
#include "clup/harness.hpp"
#include "clup/rng.hpp"

using namespace clup;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.alpha = 0.6;
    cfg.n = 200;
    cfg.snr_grid_db = {15.0};
    cfg.algorithms = {Algorithm::clup_r0};
    cfg.trials = 3;
    cfg.base_seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("ExperimentConfig::validate rejects bad configs") {
    ExperimentConfig cfg = tiny_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.n = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.snr_grid_db.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.algorithms.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.threads = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.alpha = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("tiny sweep aggregates consistently") {
    ExperimentConfig cfg = tiny_config();
    auto report = run_ber_sweep(cfg);
    REQUIRE(report.summaries.size() == 1);
    const auto& s = report.summaries[0];
    CHECK(s.trials == 3);
    CHECK(s.bits == 600);
    CHECK(s.p_err_mean == double(s.bit_errors) / double(s.bits));
    CHECK(report.trials_detail.size() == 3);
    long long total = 0;
    for (const auto& t : report.trials_detail) {
        CHECK(t.seed == derive_seed(cfg.base_seed, 0, t.trial_index));
        total += llround(t.p_err * cfg.n);
    }
    CHECK(total == s.bit_errors);
    CHECK(s.wall_time_s == 0.0);  // record_timing defaults off
    // At 15 dB with n = 200, clup_r0 should decode cleanly
    CHECK(s.p_err_mean <= 0.02);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
    ExperimentConfig cfg = tiny_config();
    cfg.snr_grid_db = {13.0, 15.0};
    cfg.algorithms = {Algorithm::polytope, Algorithm::clup_r0};
    std::string texts[3];
    const int thread_counts[3] = {1, 2, 8};
    for (int i = 0; i < 3; ++i) {
        cfg.threads = thread_counts[i];
        auto report = run_ber_sweep(cfg);
        std::string stem = "harness_det_" + std::to_string(i);
        write_report(report, stem + ".json");
        texts[i] = slurp(stem + ".json") + "\n----\n" + slurp(stem + ".csv");
        std::remove((stem + ".json").c_str());
        std::remove((stem + ".csv").c_str());
    }
    CHECK(texts[0] == texts[1]);
    CHECK(texts[0] == texts[2]);
}

TEST_CASE("write_report emits the documented CSV header and JSON fields") {
    ExperimentConfig cfg = tiny_config();
    auto report = run_ber_sweep(cfg);
    write_report(report, "harness_fmt.json");
    std::string csv = slurp("harness_fmt.csv");
    CHECK(csv.rfind("snr_db,algorithm,trials,bits,bit_errors,p_err_mean,"
                    "p_err_median,c1_mean,c2_mean,non_convergent,wall_time_s",
                    0) == 0);
    CHECK(csv.find("clup_r0") != std::string::npos);
    std::string json = slurp("harness_fmt.json");
    CHECK(json.find("\"summaries\"") != std::string::npos);
    CHECK(json.find("\"dataset_checksum_fnv1a64\"") != std::string::npos);
    CHECK(json.find("\"artifact_version\"") != std::string::npos);
    std::remove("harness_fmt.json");
    std::remove("harness_fmt.csv");
}

TEST_CASE("config JSON round trip") {
    const char* text = R"({
        "alpha": 0.6,
        "n": 400,
        "snr_grid_db": [13.0, 14.0],
        "algorithms": ["polytope", "rephased_r1"],
        "trials": 5,
        "base_seed": 42,
        "threads": 2
    })";
    {
        std::ofstream out("harness_cfg.json");
        out << text;
    }
    auto cfg = read_config("harness_cfg.json");
    CHECK(cfg.n == 400);
    CHECK(cfg.trials == 5);
    CHECK(cfg.base_seed == 42);
    CHECK(cfg.threads == 2);
    REQUIRE(cfg.snr_grid_db.size() == 2);
    CHECK(cfg.snr_grid_db[1] == doctest::Approx(14.0));
    REQUIRE(cfg.algorithms.size() == 2);
    CHECK(cfg.algorithms[0] == Algorithm::polytope);
    CHECK(cfg.algorithms[1] == Algorithm::rephased_r1);
    std::remove("harness_cfg.json");

    {
        std::ofstream out("harness_cfg_bad.json");
        out << R"({"alpha": 0.6, "trials": 5})";  // missing required fields
    }
    CHECK_THROWS_AS(read_config("harness_cfg_bad.json"), DataError);
    try {
        read_config("harness_cfg_bad.json");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("'n'") != std::string::npos);
    }
    std::remove("harness_cfg_bad.json");
    CHECK_THROWS_AS(read_config("harness_cfg_missing.json"), DataError);
}

TEST_CASE("derive_seed is collision-free over a large index box") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 100; ++a)
        for (std::uint64_t b = 0; b < 100; ++b)
            for (std::uint64_t base : {0ull, 1ull, 77ull})
                seen.insert(derive_seed(base, a, b));
    CHECK(seen.size() == 100u * 100u * 3u);
}

TEST_CASE("algorithm string round trips") {
    for (Algorithm a : {Algorithm::polytope, Algorithm::clup_exact,
                        Algorithm::clup_r0, Algorithm::rephased_r1,
                        Algorithm::rephased_r3}) {
        CHECK(algorithm_from_string(to_string(a)) == a);
    }
    CHECK_THROWS_AS(algorithm_from_string("nonsense"), ConfigError);
}
