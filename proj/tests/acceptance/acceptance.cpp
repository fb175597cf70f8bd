// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "heatcons/analysis.hpp"
#include "heatcons/eigen_ode.hpp"
#include "heatcons/semigroup.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace heatcons;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Suite {
    const char* name;
    ManifoldSpec spec;
    Verdict expected;
};

std::vector<Suite> suite() {
    return {
        {"plane", ManifoldSpec::from_strings(2, "r", "1", "0"), Verdict::conservative_generalized},
        {"R^3", ManifoldSpec::from_strings(3, "r", "1", "0"), Verdict::conservative_generalized},
        {"incomplete", ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0"), Verdict::not_conservative},
        {"incomplete+V", ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "exp(8*r)"),
         Verdict::conservative_generalized},
        {"rho=1+r^2", ManifoldSpec::from_strings(2, "r", "1+r^2", "0"), Verdict::conservative_generalized},
    };
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Power series of I_0, summed until the terms vanish.
double bessel_i0(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200 && term > 1e-18 * sum; ++k) {
        term *= (x / 2) * (x / 2) / (double(k) * k);
        sum += term;
    }
    return sum;
}

double sinh_over_r(double r) { return r < 1e-4 ? 1.0 + r * r / 6.0 : std::sinh(r) / r; }

double max_rel_error(const RadialSolution& s, const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t j = 0; j < s.grid.size(); ++j)
        worst = std::max(worst, std::fabs(s.values[j] / exact(s.grid[j]) - 1.0));
    return worst;
}

Outcome bessel() {
    const auto plane = ManifoldSpec::from_strings(2, "r", "1", "0");
    const auto space = ManifoldSpec::from_strings(3, "r", "1", "0");
    const double e2 = max_rel_error(solve_radial_eigen(plane, 1.0, 10.0, 4096), bessel_i0);
    const double e3 = max_rel_error(solve_radial_eigen(space, 1.0, 10.0, 4096), sinh_over_r);
    return {e2 <= 1e-6 && e3 <= 1e-6, "I0 rel err " + g(e2) + ", sinh(r)/r rel err " + g(e3)};
}

Outcome unanimity() {
    Outcome o{true, ""};
    for (const auto& s : suite()) {
        AnalysisParams p;
        p.sturm = false;
        const ConservationReport rep = analyze(s.spec, p);
        const bool ok = rep.final == s.expected && rep.disagreements.empty();
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + s.name + " " + to_string(rep.final);
    }
    return o;
}

Outcome laplace() {
    const auto grid = build_grid(ManifoldSpec::from_strings(2, "r", "1", "0"), 10.0, 1024);
    RunOptions opts;
    opts.laplace_alphas = {1.0, 2.0};
    const SemigroupRun coarse = run_H(grid, 20.0, 1e-3, opts);
    const SemigroupRun fine = run_H(grid, 20.0, 5e-4, opts);
    Outcome o{true, ""};
    for (double alpha : {1.0, 2.0}) {
        const auto N = run_N(grid, alpha);
        const double d1 = laplace_consistency(coarse, N, alpha);
        const double d2 = laplace_consistency(fine, N, alpha);
        const double ratio = d2 / d1;
        const bool ok = d1 <= 5e-4 && std::fabs(ratio - 0.5) <= 0.05;
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + "alpha=" + g(alpha) + ": " + g(d1) +
                    (d1 <= 5e-4 ? " <= " : " > ") + "5e-4, halved dt ratio " + g(ratio);
    }
    return o;
}

Outcome unit_potential() {
    const SemigroupRun run = run_H(ManifoldSpec::from_strings(2, "r", "1", "1"), 10.0, 1024, 2.0, 1e-3);
    Outcome o{true, ""};
    for (double t : {0.5, 1.0, 2.0}) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < run.times.size(); ++i)
            if (std::fabs(run.times[i] - t) < std::fabs(run.times[k] - t)) k = i;
        const double H = run.H[k][0];
        const bool ok = std::fabs(run.times[k] - t) < 1e-9 && H >= 1.0 - 1e-4 && H <= 1.0 + 1e-8;
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : ", ") + "H(" + g(t) + ")-1=" + g(H - 1.0);
    }
    return o;
}

Outcome heat_loss() {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0");
    const SweepResult sweep = exhaustion_sweep(m, {4.0, 5.0, 6.0}, 1.0, 1.0, {});
    double lo = 1.0, hi = 0.0;
    bool below = true;
    for (const auto& e : sweep.entries) {
        below = below && e.H_origin < 1.0 - 1e-3;
        lo = std::min(lo, e.heat_loss);
        hi = std::max(hi, e.heat_loss);
    }
    const double variation = (hi - lo) / sweep.entries.back().heat_loss;
    const DichotomyResult d = dichotomy_check(sweep.last_run, sweep.epsilon_R);
    return {below && variation < 0.1 && d.pass, "H plateau " + g(sweep.entries.back().H_origin) +
                                                    ", variation " + g(variation) + " of the deficit, dichotomy " +
                                                    to_string(d.kind)};
}

Outcome time_change() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(std::log(1e-3), std::log(16.0));
    double worst = 0.0;
    for (const auto& s : suite()) {
        const ManifoldSpec t = s.spec.time_changed();
        for (int i = 0; i < 1000; ++i) {
            const double r = std::exp(u(rng));
            const double a = volume_test_integrand(s.spec, r), b = volume_test_integrand(t, r);
            worst = std::max(worst, std::fabs(a - b) / std::fabs(b));
        }
    }
    return {worst <= 1e-12, "max rel difference " + g(worst) + " over 5000 radii"};
}

Outcome potential() {
    const auto m = ManifoldSpec::from_strings(2, "r*exp(r^3)", "1", "0");
    const PotentialResult res = build_conservative_potential(m, PotentialStrategy::corollary_radial);
    AnalysisParams p;
    p.sturm = false;
    const ConservationReport rep = analyze(m.with_potential(*res.potential), p);
    const bool ok = res.retest && res.retest->classification == TailClass::divergent &&
                    rep.final == Verdict::conservative_generalized;
    return {ok, "exponent " + std::to_string(res.exponent) + ", retest " + to_string(res.retest->classification) +
                    ", final " + to_string(rep.final)};
}

Outcome scheme_invariants() {
    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::vector<ManifoldSpec> specs{ManifoldSpec::from_strings(2, "r", "1", "0"),
                                          ManifoldSpec::from_strings(3, "sinh(r)", "1", "r^2"),
                                          ManifoldSpec::from_strings(2, "r*exp(r^3)", "1+r", "exp(r)")};
    std::vector<RadialGrid> grids;
    for (const auto& m : specs) grids.push_back(build_grid(m, 4.0, 128));
    int failures = 0;
    double worst_duhamel = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const RadialGrid& gr = grids[trial % grids.size()];
        const std::size_t n = gr.r.size();
        const double dt = std::pow(10.0, -4.0 + 3.0 * unif(rng));
        std::vector<double> a(n), b(n), src(n), zero(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            a[j] = unif(rng);
            b[j] = a[j] + (1 - a[j]) * unif(rng);
            src[j] = gr.vhat[j] * unif(rng);
        }
        const auto ua = step_heat(gr, a, dt, zero);
        const auto ub = step_heat(gr, b, dt, zero);
        const auto both = step_heat(gr, a, dt, src);
        const auto only = step_heat(gr, zero, dt, src);
        bool ok = true;
        for (std::size_t j = 0; j < n; ++j) {
            ok = ok && ua[j] >= 0.0 && ua[j] <= 1.0 && ua[j] <= ub[j];
            const double gap = std::fabs(both[j] - (ua[j] + only[j]));
            worst_duhamel = std::max(worst_duhamel, gap);
            ok = ok && gap <= 1e-10;
        }
        failures += ok ? 0 : 1;
    }
    return {failures == 0, std::to_string(1000 - failures) + "/1000 trials, max Duhamel gap " + g(worst_duhamel)};
}

Outcome independence() {
    Outcome o{true, ""};
    for (const auto& s : suite()) {
        std::vector<Verdict> kv;
        for (double alpha : {0.5, 1.0, 2.0}) kv.push_back(khasminskii_verdict(s.spec, alpha).verdict);
        std::vector<TailClass> tv;
        for (double a : {0.5, 1.0, 2.0}) tv.push_back(generalized_volume_test(s.spec, a).classification);
        const bool ok = kv[0] == kv[1] && kv[1] == kv[2] && tv[0] == tv[1] && tv[1] == tv[2];
        o.pass = o.pass && ok;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + s.name + " " + to_string(kv[0]) + "/" +
                    to_string(tv[0]) + (ok ? "" : " (differs)");
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {1, "Bessel oracle", 1.0, bessel},
        {2, "three-method unanimity", 120.0, unanimity},
        {3, "Laplace identity", 60.0, laplace},
        {4, "generalized conservation with V=1", 30.0, unit_potential},
        {5, "heat loss at infinity", 120.0, heat_loss},
        {6, "time-change identity", 5.0, time_change},
        {7, "potential construction", 60.0, potential},
        {8, "scheme invariants", 30.0, scheme_invariants},
        {9, "alpha- and a-independence", 60.0, independence},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        if (!in_time) o.detail += "; over the " + g(c.budget_s) + " s budget";
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %d %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
