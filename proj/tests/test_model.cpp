#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "clup/errors.hpp"
#include "clup/model.hpp"

using namespace clup;

TEST_CASE("snr_db_to_sigma") {
    CHECK(snr_db_to_sigma(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(snr_db_to_sigma(20.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(snr_db_to_sigma(13.0) ==
          doctest::Approx(0.22387211385683395).epsilon(1e-14));
    // 1/sigma^2 in dB round-trips to the input
    const double s = snr_db_to_sigma(7.3);
    CHECK(10.0 * std::log10(1.0 / (s * s)) == doctest::Approx(7.3).epsilon(1e-12));
}

TEST_CASE("SystemDims::from_alpha rounds m") {
    auto d = SystemDims::from_alpha(2000, 0.6);
    CHECK(d.m == 1200);
    CHECK(d.n == 2000);
    auto d2 = SystemDims::from_alpha(4000, 0.6);
    CHECK(d2.m == 2400);
    CHECK_THROWS_AS(SystemDims::from_alpha(0, 0.6), ConfigError);
    CHECK_THROWS_AS(SystemDims::from_alpha(100, -1.0), ConfigError);
}

TEST_CASE("generate_instance reconstruction and determinism") {
    auto dims = SystemDims::from_alpha(400, 0.6);
    auto a = generate_instance(dims, 0.3, 17);
    auto b = generate_instance(dims, 0.3, 17);
    CHECK(a.A == b.A);
    CHECK(a.v == b.v);
    CHECK(a.x_sol == b.x_sol);
    CHECK((a.y - a.A * a.x_sol - a.sigma * a.v).norm() <= 1e-12 * a.y.norm());
    CHECK(a.x_sol.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < dims.n; ++i)
        CHECK(std::abs(a.x_sol(i)) == doctest::Approx(1.0 / 20.0).epsilon(1e-12));

    auto c = generate_instance(dims, 0.3, 18);
    CHECK(a.A != c.A);
}

TEST_CASE("generate_instance all_plus, noiseless") {
    auto dims = SystemDims::from_alpha(4, 0.5);
    auto inst = generate_instance(dims, 0.0, 7, SolMode::all_plus);
    CHECK(inst.dims.m == 2);
    for (int i = 0; i < 4; ++i) CHECK(inst.x_sol(i) == doctest::Approx(0.5));
    CHECK((inst.y - inst.A * inst.x_sol).norm() <= 1e-14);
}

TEST_CASE("generate_instance statistical sanity") {
    auto dims = SystemDims::from_alpha(1000, 0.6);
    auto inst = generate_instance(dims, 0.1, 3);
    const double mean = inst.A.mean();
    const double msq = inst.A.array().square().mean();
    CHECK(std::abs(mean) <= 0.01);
    CHECK(msq == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("overlap_stats") {
    auto dims = SystemDims::from_alpha(64, 0.6);
    auto inst = generate_instance(dims, 0.2, 5);
    auto s = overlap_stats(inst.x_sol, inst.x_sol);
    CHECK(s.c1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.c2 == doctest::Approx(1.0).epsilon(1e-12));
    auto sm = overlap_stats(-inst.x_sol, inst.x_sol);
    CHECK(sm.c1 == doctest::Approx(-1.0).epsilon(1e-12));
    auto sz = overlap_stats(Vector::Zero(64), inst.x_sol);
    CHECK(sz.c1 == 0.0);
    CHECK(sz.c2 == 0.0);
    CHECK_THROWS_AS(overlap_stats(Vector::Zero(3), inst.x_sol), ConfigError);
}

TEST_CASE("bit_error_fraction") {
    auto dims = SystemDims::from_alpha(4, 0.5);
    auto inst = generate_instance(dims, 0.0, 1);
    CHECK(bit_error_fraction(inst.x_sol, inst.x_sol) == 0.0);
    CHECK(bit_error_fraction(-inst.x_sol, inst.x_sol) == 1.0);
    Vector one_flip = inst.x_sol;
    one_flip(2) = -one_flip(2);
    CHECK(bit_error_fraction(one_flip, inst.x_sol) == doctest::Approx(0.25));
    CHECK_THROWS_AS(bit_error_fraction(Vector::Zero(3), inst.x_sol), ConfigError);
}

TEST_CASE("round_to_corner") {
    const int n = 9;
    Vector x(n);
    x.setConstant(0.01);
    Vector q = round_to_corner(x, n);
    for (int i = 0; i < n; ++i) CHECK(q(i) == doctest::Approx(1.0 / 3.0));
    // sign(0) = +
    Vector z = Vector::Zero(n);
    Vector qz = round_to_corner(z, n);
    for (int i = 0; i < n; ++i) CHECK(qz(i) == doctest::Approx(1.0 / 3.0));
    // idempotent on corners
    Vector q2 = round_to_corner(q, n);
    CHECK((q2 - q).norm() == 0.0);
}
