#include <doctest.h>

#include "heatcons/error.hpp"
#include "heatcons/manifold.hpp"

#include <cmath>
#include <numbers>

using namespace heatcons;

TEST_CASE("unit sphere areas") {
    CHECK(unit_sphere_area(2) == doctest::Approx(2 * std::numbers::pi));
    CHECK(unit_sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
    CHECK(unit_sphere_area(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("euclidean volumes match closed forms") {
    for (int n : {2, 3, 5}) {
        const auto m = ManifoldSpec::from_strings(n, "r", "1", "0");
        for (double r : {0.5, 2.0, 10.0}) {
            const double exact = unit_sphere_area(n) * std::pow(r, n) / n;
            CHECK(volume(m, Weight::rho, r) == doctest::Approx(exact).epsilon(1e-9));
        }
    }
}

TEST_CASE("hyperbolic plane volume") {
    const auto m = ManifoldSpec::from_strings(2, "sinh(r)", "1", "0");
    for (double r : {0.1, 1.0, 5.0, 30.0})
        CHECK(volume(m, Weight::rho, r) == doctest::Approx(2 * std::numbers::pi * (std::cosh(r) - 1)).epsilon(1e-9));
}

TEST_CASE("superexponential volume stays finite in log space") {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0");
    // Laplace asymptotics: log v ~ r^3 + log(2 pi r / (3 r^2)) for large r.
    const double lv = log_volume(m, Weight::rho, 100.0);
    CHECK(std::isfinite(lv));
    CHECK(lv == doctest::Approx(1e6 + std::log(2 * std::numbers::pi * 100.0 / 3e4)).epsilon(1e-9));
    CHECK(std::isinf(volume(m, Weight::rho, 100.0)));
}

TEST_CASE("rho plus V volume is additive") {
    const auto m = ManifoldSpec::from_strings(3, "sinh(r)", "exp(-r)", "r^2");
    for (double r : {0.5, 3.0, 8.0}) {
        const double sum = volume(m, Weight::rho, r) + volume(m, Weight::potential_only, r);
        CHECK(volume(m, Weight::rho_plus_V, r) == doctest::Approx(sum).epsilon(1e-9));
    }
}

TEST_CASE("intrinsic distance") {
    const auto flat = ManifoldSpec::from_strings(2, "r", "1", "0");
    CHECK(intrinsic_distance(flat, 7.0) == doctest::Approx(7.0).epsilon(1e-9));
    const auto g = ManifoldSpec::from_strings(2, "r", "exp(-r^2)", "0");
    CHECK(intrinsic_distance(g, 50.0) == doctest::Approx(std::sqrt(2 * std::numbers::pi) / 2).epsilon(1e-8));
}

TEST_CASE("validation reports offending radii") {
    CHECK(validate(ManifoldSpec::from_strings(2, "sinh(r)", "1", "0")).empty());
    const auto bad = validate(ManifoldSpec::from_strings(2, "r*(3-r)", "1", "0"));
    REQUIRE_FALSE(bad.empty());
    CHECK(bad.front().r >= 3.0);
    CHECK(bad.front().r < 3.01);
    CHECK_FALSE(validate(ManifoldSpec::from_strings(2, "1+r", "1", "0")).empty());
    CHECK_FALSE(validate(ManifoldSpec::from_strings(2, "r", "1", "r-1")).empty());
    CHECK_FALSE(validate(ManifoldSpec::from_strings(1, "r", "1", "0")).empty());
}

TEST_CASE("geometry cache agrees with direct quadrature") {
    const auto m = ManifoldSpec::from_strings(3, "sinh(r)", "1+r", "exp(-r)");
    GeometryCache cache(m, 64.0, 512);
    for (double r : {0.01, 1.0, 10.0, 64.0, 100.0}) {
        for (Weight w : {Weight::rho, Weight::rho_plus_V, Weight::potential_only})
            CHECK(cache.log_volume(w, r) == doctest::Approx(log_volume(m, w, r)).epsilon(1e-10));
        CHECK(cache.intrinsic_distance(r) == doctest::Approx(intrinsic_distance(m, r)).epsilon(1e-10));
    }
}

TEST_CASE("volume is monotone in r") {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^3)", "exp(-r)", "0");
    GeometryCache cache(m, 50.0, 1024);
    double prev = -INFINITY;
    for (double r = 0.01; r < 80.0; r *= 1.07) {
        const double lv = cache.log_volume(Weight::rho, r);
        CHECK(lv >= prev);
        prev = lv;
    }
}

TEST_CASE("inverse intrinsic distance") {
    GeometryCache flat(ManifoldSpec::from_strings(2, "r", "1", "0"), 64.0, 512);
    CHECK(*flat.inverse_intrinsic_distance(10.0) == doctest::Approx(10.0).epsilon(1e-10));
    CHECK(*flat.inverse_intrinsic_distance(1000.0) == doctest::Approx(1000.0).epsilon(1e-10));
    GeometryCache bounded(ManifoldSpec::from_strings(2, "r", "exp(-r^2)", "0"), 64.0, 512);
    CHECK_FALSE(bounded.inverse_intrinsic_distance(2.0).has_value());
}

TEST_CASE("time change moves V into the density") {
    const auto m = ManifoldSpec::from_strings(2, "sinh(r)", "1", "r^2");
    const auto t = m.time_changed();
    CHECK(t.potential.is_constant());
    for (double r : {0.5, 2.0}) CHECK(t.rho.eval(r) == doctest::Approx(1 + r * r));
}

TEST_CASE("volume across a jump in the potential") {
    // V jumps from 0 to 16 e^2 at r = 1; the weighted volume is continuous there.
    const auto V = RadialExpr::parse("piecewise(1, 0, 16*r^6*exp(2*r^4))");
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0").with_potential(V);
    const GeometryCache cache(m, 512.0, 4096);
    const double below = cache.log_volume(Weight::rho_plus_V, 1.0);
    CHECK(std::exp(below) == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    CHECK(cache.log_volume(Weight::rho_plus_V, 1.0 + 1e-12) == doctest::Approx(below).epsilon(1e-9));
    const double past = std::numbers::pi + 2 * std::numbers::pi * (1 + 16 * std::exp(2.0)) * 1e-7;
    CHECK(std::exp(log_volume(m, Weight::rho_plus_V, 1.0 + 1e-7)) == doctest::Approx(past).epsilon(1e-9));
}
