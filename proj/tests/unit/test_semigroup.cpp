#include <doctest.h>

#include "heatcons/error.hpp"
#include "heatcons/semigroup.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

using namespace heatcons;

namespace {

double bessel_j0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 100; ++k) {
        term *= -(x / 2) * (x / 2) / (double(k) * k);
        sum += term;
    }
    return sum;
}

double first_j0_zero() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j0_series(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Smallest eigenvalue of -A by inverse iteration in the w-weighted inner product.
double principal_eigenvalue(const RadialGrid& g) {
    const std::size_t M = g.cells();
    std::vector<double> d(M), u(M), l(M);
    for (std::size_t j = 0; j < M; ++j) {
        d[j] = g.upper[j] + g.lower[j] + g.vhat[j];
        u[j] = -g.upper[j];
        l[j] = -g.lower[j];
    }
    auto solve = [&](std::vector<double> x) {
        std::vector<double> c(M), dd(M);
        for (std::size_t j = 0; j < M; ++j) {
            const double den = d[j] - (j ? l[j] * c[j - 1] : 0.0);
            c[j] = u[j] / den;
            x[j] = (x[j] - (j ? l[j] * x[j - 1] : 0.0)) / den;
        }
        for (std::size_t j = M - 1; j-- > 0;) x[j] -= c[j] * x[j + 1];
        return x;
    };
    const auto w = g.weights();
    std::vector<double> x(M, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        auto y = solve(x);
        double num = 0, den = 0;
        for (std::size_t j = 0; j < M; ++j) num += w[j] * x[j] * y[j], den += w[j] * y[j] * y[j];
        lambda = num / den;
        double norm = 0;
        for (double v : y) norm = std::max(norm, std::fabs(v));
        for (std::size_t j = 0; j < M; ++j) x[j] = y[j] / norm;
    }
    return lambda;
}

}  // namespace

TEST_CASE("first zero of J0") { CHECK(first_j0_zero() == doctest::Approx(2.4048256).epsilon(1e-7)); }

TEST_CASE("euclidean grid weights are annulus areas") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const auto g = build_grid(m, 10.0, 512);
    REQUIRE(g.r.size() == 513);
    CHECK(g.r.front() == 1e-6);
    CHECK(g.r.back() == 10.0);
    const auto w = g.weights();
    for (std::size_t j = 0; j <= g.cells(); ++j) {
        const double a = j == 0 ? 0.0 : g.faces[j - 1];
        const double b = j == g.cells() ? 10.0 : g.faces[j];
        CHECK(w[j] == doctest::Approx(std::numbers::pi * (b * b - a * a)).epsilon(1e-6));
    }
    for (double v : g.vhat) CHECK(v == 0.0);
}

TEST_CASE("grid invariants") {
    const char* specs[][4] = {{"2", "r", "1", "0"}, {"2", "r*exp(r^3)", "1", "exp(8*r)"}, {"3", "sinh(r)", "1+r^2", "r"}};
    for (auto& sp : specs) {
        const auto m = ManifoldSpec::from_strings(std::stoi(sp[0]), sp[1], sp[2], sp[3]);
        const auto g = build_grid(m, 6.0, 256);
        for (std::size_t j = 1; j < g.r.size(); ++j) {
            CHECK(g.r[j] > g.r[j - 1]);
            if (j >= 2) CHECK((g.r[j] - g.r[j - 1]) / (g.r[j - 1] - g.r[j - 2]) <= 1.05 + 1e-12);
        }
        for (double lw : g.log_weight) CHECK(std::isfinite(lw));
        for (std::size_t j = 0; j < g.cells(); ++j) {
            CHECK(g.upper[j] > 0.0);
            if (j) CHECK(g.lower[j] > 0.0);
        }
        // Row sums of A with the Dirichlet column are <= 0.
        const auto A1 = apply_operator(g, std::vector<double>(g.r.size(), 1.0));
        for (std::size_t j = 0; j < g.cells(); ++j) CHECK(A1[j] <= 0.0);
    }
}

TEST_CASE("principal eigenvalue converges to the disk eigenvalue") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const double R = 10.0;
    const double exact = std::pow(first_j0_zero() / R, 2);
    const double e64 = std::fabs(principal_eigenvalue(build_grid(m, R, 64)) / exact - 1);
    const double e128 = std::fabs(principal_eigenvalue(build_grid(m, R, 128)) / exact - 1);
    const double e1024 = std::fabs(principal_eigenvalue(build_grid(m, R, 1024)) / exact - 1);
    CHECK(e128 < e64);
    CHECK(e1024 < 1e-3);
}

TEST_CASE("step_heat basics") {
    const auto g = build_grid(ManifoldSpec::from_strings(2, "r", "1", "0"), 10.0, 256);
    const std::size_t n = g.r.size();
    const std::vector<double> zero(n, 0.0);
    for (double v : step_heat(g, zero, 1e-3, zero)) CHECK(v == 0.0);
    std::vector<double> ones(n, 1.0);
    ones.back() = 0.0;
    const auto out = step_heat(g, ones, 1e-2, zero);
    // Exact up to a few ulp of rounding in the tridiagonal sweep.
    for (double v : out) CHECK(v <= 1.0 + 4 * std::numeric_limits<double>::epsilon());
    CHECK(out[n - 2] < 1.0);
    CHECK(out.back() == 0.0);
}

TEST_CASE("long-time decay follows the principal eigenvalue") {
    const auto g = build_grid(ManifoldSpec::from_strings(2, "r", "1", "0"), 10.0, 512);
    const double dt = 1e-3;
    const double lambda = std::pow(first_j0_zero() / 10.0, 2);
    HeatStepper stepper(g, dt);
    std::vector<double> u(g.r.size(), 1.0);
    for (int k = 0; k < 40000; ++k) stepper.advance(u, nullptr);
    const double before = u[0];
    stepper.advance(u, nullptr);
    const double rate = -std::log(u[0] / before) / dt;
    CHECK(rate == doctest::Approx(lambda).epsilon(0.02));
}

TEST_CASE("randomized Markov, comparison and Duhamel properties") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::vector<ManifoldSpec> specs{ManifoldSpec::from_strings(2, "r", "1", "0"),
                                          ManifoldSpec::from_strings(3, "sinh(r)", "1", "r^2"),
                                          ManifoldSpec::from_strings(2, "r*exp(r^3)", "1+r", "exp(r)")};
    std::vector<RadialGrid> grids;
    for (const auto& m : specs) grids.push_back(build_grid(m, 4.0, 96));
    for (int trial = 0; trial < 1000; ++trial) {
        const RadialGrid& g = grids[trial % grids.size()];
        const std::size_t n = g.r.size();
        const double dt = std::pow(10.0, -4.0 + 3.0 * unif(rng));
        std::vector<double> a(n), b(n), src(n), zero(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = unif(rng);
            b[j] = a[j] + (1 - a[j]) * unif(rng);
            src[j] = g.vhat[j] * unif(rng);
        }
        const auto ua = step_heat(g, a, dt, zero);
        const auto ub = step_heat(g, b, dt, zero);
        for (std::size_t j = 0; j < n; ++j) {
            REQUIRE(ua[j] >= 0.0);
            REQUIRE(ua[j] <= 1.0);
            REQUIRE(ua[j] <= ub[j]);
        }
        // One step with the source equals the source-free step plus the
        // step of the source alone.
        const auto both = step_heat(g, a, dt, src);
        const auto only = step_heat(g, zero, dt, src);
        for (std::size_t j = 0; j < n; ++j) REQUIRE(std::fabs(both[j] - (ua[j] + only[j])) <= 1e-10);
    }
}

TEST_CASE("zero potential gives W = 0 and H = U") {
    const auto run = run_H(ManifoldSpec::from_strings(2, "r", "1", "0"), 5.0, 256, 0.2, 1e-3);
    for (std::size_t k = 0; k < run.times.size(); ++k)
        for (std::size_t j = 0; j < run.grid.r.size(); ++j) {
            CHECK(run.W[k][j] == 0.0);
            CHECK(run.H[k][j] == run.U[k][j]);
        }
}

TEST_CASE("plane keeps its heat for short times") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const auto run = run_H(m, 10.0, 1024, 0.1, 1e-3);
    CHECK(run.H.back()[0] >= 1.0 - 1e-6);
    const auto fine = run_H(m, 10.0, 2048, 0.1, 5e-4);
    CHECK(std::fabs(run.heat_loss_at_origin.back() - fine.heat_loss_at_origin.back()) < 1e-6);
}

TEST_CASE("unit potential on the plane: killed heat is restored by W") {
    RunOptions opts;
    opts.record_stride = 500;
    const auto run = run_H(ManifoldSpec::from_strings(2, "r", "1", "1"), 10.0, 1024, 2.0, 1e-3, opts);
    for (std::size_t k = 0; k < run.times.size(); ++k) {
        CHECK(run.H[k][0] >= 1.0 - 1e-4);
        CHECK(run.H[k][0] <= 1.0 + 1e-8);
        // U alone decays like e^{-t}.
        CHECK(run.U[k][0] == doctest::Approx(std::exp(-run.times[k])).epsilon(1e-3));
    }
}

TEST_CASE("run invariants: bounds, Duhamel, monotone heat loss") {
    const auto run = run_H(ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "r"), 4.0, 512, 1.0, 1e-3);
    CHECK(run.duhamel_gap <= 1e-10);
    for (std::size_t k = 0; k < run.times.size(); ++k)
        for (std::size_t j = 0; j < run.grid.r.size(); ++j) {
            CHECK(run.U[k][j] >= 0.0);
            CHECK(run.W[k][j] >= 0.0);
            CHECK(run.H[k][j] <= 1.0 + 1e-12);  // rounding accumulated over 1000 steps
            CHECK(run.H[k][j] == doctest::Approx(run.U[k][j] + run.W[k][j]).epsilon(1e-12));
            if (k) {
                CHECK(run.deficit[k][j] >= run.deficit[k - 1][j]);
                CHECK(run.H[k][j] <= run.H[k - 1][j] + 1e-12);
            }
        }
}

TEST_CASE("run_H rejects bad times") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    CHECK_THROWS_AS(run_H(m, 5.0, 128, 0.0, 1e-3), ValidationError);
    CHECK_THROWS_AS(run_H(m, 5.0, 128, 1.0, -1e-3), ValidationError);
}

TEST_CASE("resolvent function") {
    const auto flat = ManifoldSpec::from_strings(2, "r", "1", "0");
    const auto N5 = run_N(flat, 1.0, 5.0, 512);
    const auto N10 = run_N(flat, 1.0, 10.0, 1024);
    for (std::size_t j = 0; j + 1 < N5.size(); ++j) CHECK((N5[j] > 0.0 && N5[j] < 1.0));
    CHECK(N10[0] > N5[0]);
    CHECK(1.0 - N10[0] < 1e-3);

    const auto withV = run_N(ManifoldSpec::from_strings(2, "r", "1", "3"), 1.0, 5.0, 512);
    for (double v : withV) CHECK(v <= 1.0);

    const auto g = build_grid(flat, 5.0, 512);
    const auto a1 = run_N(g, 10.0);
    const auto a2 = run_N(g, 20.0);
    CHECK(1.0 - a2[0] < 1.0 - a1[0]);
    CHECK(1.0 - a2[0] < 1e-8);

    const auto D = resolvent_deficit(g, 1.0);
    const auto N = run_N(g, 1.0);
    for (std::size_t j = 0; j < N.size(); ++j) CHECK(D[j] + N[j] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Laplace identity on synthetic input is exact") {
    SemigroupRun run;
    run.grid = build_grid(ManifoldSpec::from_strings(2, "r", "1", "0"), 2.0, 64);
    for (int k = 0; k <= 400; ++k) {
        run.times.push_back(0.05 * k);
        run.H.emplace_back(run.grid.r.size(), 1.0);
    }
    const std::vector<double> N(run.grid.r.size(), 1.0);
    CHECK(laplace_consistency(run, N, 1.0) < 1e-14);
    CHECK(laplace_consistency(run, N, 3.0) < 1e-14);
    CHECK_THROWS_AS(laplace_consistency(run, N, 0.5), ValidationError);
}

TEST_CASE("Laplace identity converges at first order in dt") {
    const auto g = build_grid(ManifoldSpec::from_strings(2, "r", "1", "0"), 10.0, 1024);
    RunOptions opts;
    opts.laplace_alphas = {1.0, 2.0};
    const auto coarse = run_H(g, 20.0, 1e-3, opts);
    const auto fine = run_H(g, 20.0, 5e-4, opts);
    for (double alpha : {1.0, 2.0}) {
        const auto N = run_N(g, alpha);
        const double d1 = laplace_consistency(coarse, N, alpha);
        const double d2 = laplace_consistency(fine, N, alpha);
        CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.05));
        if (alpha == 1.0) CHECK(d1 <= 5e-4);
    }
}

TEST_CASE("exhaustion sweep on the plane") {
    const auto m = ManifoldSpec::from_strings(2, "r", "1", "0");
    const double t = 1.0;
    const auto sweep = exhaustion_sweep(m, {4.0, 6.0, 8.0}, t, 1.0, {2048, 1e-3});
    for (std::size_t i = 1; i < sweep.entries.size(); ++i) {
        CHECK(sweep.entries[i].H_origin >= sweep.entries[i - 1].H_origin);
        CHECK(sweep.entries[i].N_origin >= sweep.entries[i - 1].N_origin);
    }
    CHECK(sweep.entries.back().heat_loss < 1e-5);
}

TEST_CASE("exhaustion is monotone node by node") {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^2)", "1", "r");
    const auto big = build_grid(m, 5.0, 512);
    const auto small = big.truncate(400);
    const auto a = run_H(small, 0.5, 1e-3);
    const auto b = run_H(big, 0.5, 1e-3);
    for (std::size_t k = 0; k < a.times.size(); ++k)
        for (std::size_t j = 0; j < small.r.size(); ++j) CHECK(a.H[k][j] <= b.H[k][j]);
}

TEST_CASE("incomplete model loses heat at infinity") {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0");
    const auto sweep = exhaustion_sweep(m, {4.0, 5.0, 6.0}, 1.0, 1.0, {2048, 1e-3});
    const auto coarse = exhaustion_sweep(m, {4.0, 5.0, 6.0}, 1.0, 1.0, {1024, 1e-3});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sweep.entries[i].heat_loss > 1e-3);
        CHECK(std::fabs(sweep.entries[i].heat_loss - coarse.entries[i].heat_loss) < 0.01 * sweep.entries[i].heat_loss);
    }
    const double last = sweep.entries.back().heat_loss;
    CHECK(std::fabs(last - sweep.entries.front().heat_loss) < 0.1 * last);
    CHECK(exhaustion_sweep(m, {5.0}, 1.0, 1.0, {1024, 1e-3}).entries.size() == 1);
}

TEST_CASE("CSV exports have documented row counts") {
    RunOptions opts;
    opts.record_stride = 10;
    const auto run = run_H(ManifoldSpec::from_strings(2, "r", "1", "0"), 3.0, 64, 0.1, 1e-3, opts);
    std::ostringstream os;
    write_run_csv(os, run);
    std::size_t lines = 0;
    for (char c : os.str()) lines += c == '\n';
    CHECK(lines == 1 + run.times.size() * run.grid.r.size());
    CHECK(run.times.size() == 11);
}
