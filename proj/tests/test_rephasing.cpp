#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clup/errors.hpp"
#include "clup/model.hpp"
#include "clup/rephasing.hpp"

using namespace clup;

TEST_CASE("bundled dataset loads and matches its manifest") {
    auto ds = load_bundled_dataset();
    CHECK(ds.alpha == doctest::Approx(0.6));
    CHECK(ds.row_count > 0);
    CHECK(!ds.stationary.empty());
    CHECK(!ds.phase_summaries.empty());

    // Table 3 target row
    bool found3 = false;
    for (const auto& r : ds.stationary) {
        if (r.table_id == "3" && r.role == StationaryRole::target) {
            found3 = true;
            CHECK(r.c2 == doctest::Approx(0.99992).epsilon(1e-9));
            CHECK(r.c1 == doctest::Approx(0.99987).epsilon(1e-9));
            CHECK(r.nu == doctest::Approx(-3.87390).epsilon(1e-9));
            CHECK(r.gamma == doctest::Approx(0.13117).epsilon(1e-9));
            CHECK(r.gamma1 == doctest::Approx(0.27690).epsilon(1e-9));
            CHECK(r.p_err == doctest::Approx(5.35544e-05).epsilon(1e-9));
            CHECK(r.r_norm == doctest::Approx(0.1544).epsilon(1e-9));
        }
    }
    CHECK(found3);

    // Table 4 target row
    bool found4 = false;
    for (const auto& r : ds.stationary) {
        if (r.table_id == "4" && r.role == StationaryRole::target) {
            found4 = true;
            CHECK(r.c2 == doctest::Approx(0.89631).epsilon(1e-9));
            CHECK(r.c1 == doctest::Approx(0.93352).epsilon(1e-9));
            CHECK(r.p_err == doctest::Approx(1.60267e-03).epsilon(1e-9));
            CHECK(r.r_norm == doctest::Approx(0.0926).epsilon(1e-9));
        }
    }
    CHECK(found4);
}

TEST_CASE("dataset integrity: tampering raises DataError") {
    auto ds = load_bundled_dataset();
    std::ifstream in(ds.path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    // flip one tabulated digit
    auto pos = text.find("0.99992");
    REQUIRE(pos != std::string::npos);
    text[pos + 6] = '3';
    const std::string tmp = "tampered_tables.json";
    {
        std::ofstream out(tmp);
        out << text;
    }
    CHECK_THROWS_AS(load_bundled_dataset(tmp), DataError);
    std::remove(tmp.c_str());
    CHECK_THROWS_AS(load_bundled_dataset("no_such_file.json"), DataError);
}

TEST_CASE("bundled_schedule parameters match the tables") {
    auto s14 = bundled_schedule(0.6, 14.0, ScheduleVariant::rephased_r1);
    REQUIRE(s14.phases.size() == 2);
    CHECK(s14.phases[0].r_norm == doctest::Approx(0.0926).epsilon(1e-9));
    CHECK(s14.phases[0].gamma1_scaled == doctest::Approx(1.5907).epsilon(1e-9));
    CHECK(s14.phases[1].r_norm == doctest::Approx(0.1544).epsilon(1e-9));
    CHECK(s14.phases[1].gamma1_scaled == doctest::Approx(0.2769).epsilon(1e-9));
    CHECK(s14.source == ScheduleSource::bundled);
    CHECK(s14.citations.size() == 2);

    auto s12 = bundled_schedule(0.6, 12.0, ScheduleVariant::rephased_r3);
    REQUIRE(s12.phases.size() == 4);
    const double r_expect[4] = {0.0926, 0.1389, 0.1698, 0.1852};
    const double g_expect[4] = {2.57033, 0.97477, 0.60746, 0.44706};
    for (int p = 0; p < 4; ++p) {
        CHECK(s12.phases[p].r_norm == doctest::Approx(r_expect[p]).epsilon(1e-9));
        CHECK(s12.phases[p].gamma1_scaled ==
              doctest::Approx(g_expect[p]).epsilon(1e-9));
    }

    auto s15 = bundled_schedule(0.6, 15.0, ScheduleVariant::rephased_r1);
    CHECK(s15.phases[1].r_norm == doctest::Approx(0.1358).epsilon(1e-9));

    auto s0 = bundled_schedule(0.6, 13.0, ScheduleVariant::standard_r0);
    REQUIRE(s0.phases.size() == 1);
    CHECK(s0.phases[0].r_norm == doctest::Approx(0.0926).epsilon(1e-9));

    CHECK_THROWS_AS(bundled_schedule(0.5, 13.0, ScheduleVariant::rephased_r1),
                    ConfigError);
    CHECK_THROWS_AS(bundled_schedule(0.6, 11.0, ScheduleVariant::rephased_r1),
                    ConfigError);
    CHECK_THROWS_AS(bundled_schedule(0.6, 13.0, ScheduleVariant::rephased_r3),
                    ConfigError);
    try {
        bundled_schedule(0.6, 11.0, ScheduleVariant::rephased_r1);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("supported") != std::string::npos);
    }
}

TEST_CASE("bundled rephased schedules have strictly increasing radii") {
    for (double db : {12.0, 13.0, 14.0, 15.0}) {
        auto s = bundled_schedule(0.6, db, ScheduleVariant::rephased_r1);
        CHECK(s.phases[1].r_norm > s.phases[0].r_norm);
    }
    auto s3 = bundled_schedule(0.6, 12.0, ScheduleVariant::rephased_r3);
    for (std::size_t p = 1; p < s3.phases.size(); ++p)
        CHECK(s3.phases[p].r_norm > s3.phases[p - 1].r_norm);
}

TEST_CASE("run_rephased: degenerate single-phase schedule") {
    auto dims = SystemDims::from_alpha(400, 0.6);
    auto inst = generate_instance(dims, snr_db_to_sigma(15.0), 9);
    Schedule sched;
    sched.alpha = 0.6;
    sched.snr_db = 15.0;
    PhaseConfig cfg;
    cfg.r_norm = 0.0926;
    cfg.gamma1_scaled = 1.2478;
    cfg.c2_hat = 0.9325;
    sched.phases.push_back(cfg);
    auto rr = run_rephased(inst, sched, Vector::Zero(400));
    auto plain = contraction_run(inst, cfg, Vector::Zero(400));
    REQUIRE(rr.per_phase.size() == 1);
    CHECK((rr.final_x - plain.x_final).norm() == 0.0);
    CHECK(rr.p_err_observed ==
          bit_error_fraction(round_to_corner(rr.final_x, 400), inst.x_sol));
    auto st = overlap_stats(rr.final_x, inst.x_sol);
    CHECK(rr.final_stats.c1 == doctest::Approx(st.c1));
    CHECK(rr.final_stats.c2 == doctest::Approx(st.c2));
}

TEST_CASE("run_rephased: warm start and config validation") {
    auto dims = SystemDims::from_alpha(400, 0.6);
    auto inst = generate_instance(dims, snr_db_to_sigma(14.0), 21);
    auto sched = bundled_schedule(0.6, 14.0, ScheduleVariant::rephased_r1);
    auto rr = run_rephased(inst, sched, Vector::Zero(400));
    REQUIRE(rr.per_phase.size() == 2);
    // the second phase refines the first phase's limit
    auto s0 = overlap_stats(rr.per_phase[0].x_final, inst.x_sol);
    auto s1 = overlap_stats(rr.per_phase[1].x_final, inst.x_sol);
    CHECK(s1.c1 >= s0.c1 - 0.05);

    Schedule empty;
    CHECK_THROWS_AS(run_rephased(inst, empty, Vector::Zero(400)), ConfigError);
    CHECK_THROWS_AS(run_rephased(inst, sched, Vector::Zero(3)), ConfigError);
}

TEST_CASE("run_rephased with the exact engine on a small instance") {
    auto dims = SystemDims::from_alpha(40, 0.6);
    auto inst = generate_instance(dims, snr_db_to_sigma(15.0), 2);
    Schedule sched;
    sched.alpha = 0.6;
    sched.snr_db = 15.0;
    PhaseConfig cfg;
    cfg.r_norm = 0.2;
    cfg.gamma1_scaled = 1.2478;
    cfg.i_max = 30;
    sched.phases.push_back(cfg);
    Vector x0 = inst.x_sol;  // feasible, nonzero start for the exact engine
    auto rr = run_rephased(inst, sched, x0, PhaseEngine::exact);
    CHECK(rr.per_phase.size() == 1);
    CHECK(rr.final_x.size() == 40);
}

TEST_CASE("to_string round trips") {
    CHECK(to_string(ScheduleVariant::standard_r0) == "standard_r0");
    CHECK(to_string(ScheduleVariant::rephased_r1) == "rephased_r1");
    CHECK(to_string(ScheduleVariant::rephased_r3) == "rephased_r3");
    CHECK(to_string(StationaryRole::trap) == "trap");
    CHECK(to_string(StationaryRole::lower) == "lower");
    CHECK(to_string(StationaryRole::target) == "target");
}
