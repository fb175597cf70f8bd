#include <doctest.h>

#include "heatcons/eigen_ode.hpp"
#include "heatcons/error.hpp"
#include "heatcons/quadrature.hpp"

#include <cmath>
#include <sstream>

using namespace heatcons;

namespace {

// I_0(r) = sum (r/2)^(2k) / (k!)^2.
double bessel_i0_series(double r) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= (r / 2) * (r / 2) / (double(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

double value_at(const RadialSolution& s, double r) {
    for (std::size_t j = 1; j < s.grid.size(); ++j)
        if (s.grid[j] >= r) {
            const double t = (r - s.grid[j - 1]) / (s.grid[j] - s.grid[j - 1]);
            return s.values[j - 1] + t * (s.values[j] - s.values[j - 1]);
        }
    return s.values.back();
}

}  // namespace

TEST_CASE("planar solution matches I0") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const auto s = solve_radial_eigen(m, 1.0, 10.0, 4096);
    double worst = 0;
    for (std::size_t j = 0; j < s.grid.size(); ++j)
        worst = std::max(worst, std::fabs(s.values[j] / bessel_i0_series(s.grid[j]) - 1.0));
    CHECK(worst < 1e-6);
    CHECK(bessel_i0_series(2.0) == doctest::Approx(2.2795853).epsilon(1e-7));
}

TEST_CASE("three-dimensional solution matches sinh(r)/r") {
    const auto m = ManifoldSpec::from_strings(3, "r", "1", "0");
    const auto s = solve_radial_eigen(m, 1.0, 10.0, 4096);
    double worst = 0;
    for (std::size_t j = 0; j < s.grid.size(); ++j) {
        const double r = s.grid[j];
        const double exact = r < 1e-4 ? 1.0 + r * r / 6 : std::sinh(r) / r;
        worst = std::max(worst, std::fabs(s.values[j] / exact - 1.0));
    }
    CHECK(worst < 1e-6);
    CHECK(std::sinh(2.0) / 2.0 == doctest::Approx(1.8134302).epsilon(1e-7));
}

TEST_CASE("zero source freezes f") {
    RadialProblem p{[](double r) { return std::log(2 * M_PI * r); },
                    [](double) { return -std::numeric_limits<double>::infinity(); }};
    const auto s = solve_radial(p, geometric_grid(1e-6, 50.0, 512));
    for (double v : s.values) CHECK(v == 1.0);
    for (double v : s.flux) CHECK(v == 0.0);
}

TEST_CASE("f and flux are nondecreasing") {
    const char* specs[][4] = {{"2", "r", "1", "0"},
                              {"2", "r*exp(r^3)", "1", "0"},
                              {"3", "sinh(r)", "exp(-r)", "r^2"},
                              {"2", "r*exp(r^3)", "1", "exp(8*r)"},
                              {"4", "tanh(r)", "1/(1+r^2)", "0"}};
    for (auto& sp : specs) {
        const auto m = ManifoldSpec::from_strings(std::stoi(sp[0]), sp[1], sp[2], sp[3]);
        for (double alpha : {0.5, 1.0, 2.0}) {
            const auto s = solve_radial_eigen(m, alpha, 20.0, 2048, false);
            CHECK(s.values.front() == 1.0);
            for (std::size_t j = 1; j < s.grid.size(); ++j) {
                REQUIRE(s.values[j] >= s.values[j - 1]);
                REQUIRE(s.flux[j] >= s.flux[j - 1]);
            }
        }
    }
}

TEST_CASE("saturation sets the blowup radius") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "exp(r)");
    const auto s = solve_radial_eigen(m, 1.0, 100.0, 4096, false);
    REQUIRE(s.blowup_radius.has_value());
    CHECK(*s.blowup_radius < 100.0);
    CHECK(s.values.back() == saturation_value);
}

TEST_CASE("solution dominates the volume lower bound") {
    const char* specs[][4] = {{"2", "r", "1", "0"}, {"3", "sinh(r)", "1", "r"}, {"2", "r", "1+r^2", "0"}};
    for (auto& sp : specs) {
        const auto m = ManifoldSpec::from_strings(std::stoi(sp[0]), sp[1], sp[2], sp[3]);
        const double alpha = 1.0;
        const auto s = solve_radial_eigen(m, alpha, 8.0, 4096, false);
        // 1 + int_0^r v_{alpha rho + V}(eta) / s(eta) d eta by nested quadrature.
        auto inner = [&](double eta) {
            auto integrand = [&](double xi) {
                return (alpha * m.rho.eval(xi) + m.potential.eval(xi)) * std::exp(m.log_surface(xi));
            };
            return quadrature::integrate(integrand, 0.0, eta, {1e-11, 1e-300}).value / std::exp(m.log_surface(eta));
        };
        for (double r : {0.5, 2.0, 5.0, 8.0}) {
            const double bound = 1.0 + quadrature::integrate(inner, 1e-9, r, {1e-9, 1e-300}).value;
            const double f = value_at(s, r);
            CHECK_MESSAGE(f >= bound - 1e-4 * f, sp[1] << " r=" << r);
        }
    }
}

TEST_CASE("doubling M barely moves f(R)") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const double a = solve_radial_eigen(m, 1.0, 10.0, 2048).values.back();
    const double b = solve_radial_eigen(m, 1.0, 10.0, 4096).values.back();
    CHECK(std::fabs(a / b - 1.0) < 1e-4);
}

TEST_CASE("invalid arguments") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    CHECK_THROWS_AS(solve_radial_eigen(m, 0.0, 10.0, 128), ValidationError);
    CHECK_THROWS_AS(solve_radial_eigen(m, 1.0, 10.0, 32), ValidationError);
    CHECK_THROWS_AS(solve_radial_eigen(ManifoldSpec::from_strings(2, "1+r", "1", "0"), 1.0, 10.0, 128),
                    ValidationError);
}

TEST_CASE("khasminskii verdicts") {
    const auto flat = ManifoldSpec::from_strings(2, "r", "1", "0");
    CHECK(khasminskii_verdict(flat, 1.0).verdict == Verdict::conservative_generalized);
    const auto fast = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0");
    const auto k = khasminskii_verdict(fast, 1.0);
    CHECK(k.verdict == Verdict::not_conservative);
    REQUIRE(k.bound.has_value());
    CHECK(*k.bound >= k.samples.back().second);
    const auto heavy = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "exp(8*r)");
    CHECK(khasminskii_verdict(heavy, 1.0).verdict == Verdict::conservative_generalized);
}

TEST_CASE("khasminskii verdict does not depend on alpha") {
    const char* specs[][4] = {{"2", "r", "1", "0"},
                              {"2", "r*exp(r^3)", "1", "0"},
                              {"2", "r*exp(r^3)", "1", "exp(8*r)"},
                              {"3", "sinh(r)", "1", "0"},
                              {"2", "r*exp(r^2)", "1", "0"}};
    for (auto& sp : specs) {
        const auto m = ManifoldSpec::from_strings(std::stoi(sp[0]), sp[1], sp[2], sp[3]);
        const auto ref = khasminskii_verdict(m, 1.0).verdict;
        for (double alpha : {0.5, 2.0})
            CHECK_MESSAGE(khasminskii_verdict(m, alpha).verdict == ref, std::string(sp[1]) << " alpha=" << alpha);
    }
}

TEST_CASE("solution CSV") {
    const auto s = solve_radial_eigen(ManifoldSpec::from_strings(2, "r", "1", "0"), 1.0, 2.0, 64, false);
    std::ostringstream os;
    write_solution_csv(os, s);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,f,flux\r");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 64);
}
