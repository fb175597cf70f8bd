#include "heatcons/analysis.hpp"

#include "heatcons/error.hpp"
#include "heatcons/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <limits>
#include <sstream>

namespace heatcons {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Heat loss at node j and record k. The separately evolved deficit is used
// unless it disagrees with 1 - H, which happens only for edited runs.
double loss_at(const SemigroupRun& run, std::size_t k, std::size_t j) {
    const double from_H = 1.0 - run.H[k][j];
    if (k < run.deficit.size() && j < run.deficit[k].size()) {
        const double d = run.deficit[k][j];
        if (std::fabs(d - from_H) <= 1e-9) return d;
    }
    return from_H;
}

template <class F>
auto guarded(std::vector<std::pair<std::string, std::string>>& errors, const std::string& name, std::future<F>& job)
    -> std::optional<F> {
    try {
        return job.get();
    } catch (const std::exception& e) {
        errors.emplace_back(name, e.what());
        return std::nullopt;
    }
}

}  // namespace

const char* to_string(DichotomyResult::Kind k) {
    switch (k) {
        case DichotomyResult::Kind::no_loss: return "no_loss";
        case DichotomyResult::Kind::loss_everywhere: return "loss_everywhere";
        case DichotomyResult::Kind::mixed: return "mixed";
    }
    return "?";
}

const char* to_string(PotentialStrategy s) {
    return s == PotentialStrategy::corollary_radial ? "corollary_radial" : "sturm_convex";
}

Verdict as_verdict(TailClass c) {
    switch (c) {
        case TailClass::divergent: return Verdict::conservative_generalized;
        case TailClass::convergent: return Verdict::not_conservative;
        default: return Verdict::inconclusive;
    }
}

DichotomyResult dichotomy_check(const SemigroupRun& run, double epsilon_R, std::optional<double> t_min) {
    DichotomyResult out;
    out.t_min = t_min ? *t_min : 10.0 * run.dt;
    if (run.times.empty()) {
        out.note = "empty run";
        return out;
    }
    const double R = run.grid.r.empty() ? 0.0 : run.grid.r.back();
    std::vector<std::size_t> nodes;
    for (std::size_t j = 0; j + 1 < run.grid.r.size() && run.grid.r[j] <= R / 4.0; ++j) nodes.push_back(j);
    std::vector<std::size_t> records;
    for (std::size_t k = 0; k < run.times.size(); ++k)
        if (run.times[k] >= out.t_min) records.push_back(k);
    if (nodes.empty() || records.empty()) {
        out.note = "no probe points (nodes r <= R/4, times t >= " + fmt(out.t_min) + ")";
        return out;
    }
    const std::size_t last = records.back();

    std::vector<std::pair<double, double>> above, nonpositive, final_small;
    for (std::size_t k : records)
        for (std::size_t j : nodes) {
            const double d = loss_at(run, k, j);
            if (d > epsilon_R) above.emplace_back(run.times[k], run.grid.r[j]);
            if (!(d > 0.0)) nonpositive.emplace_back(run.times[k], run.grid.r[j]);
            if (k == last && !(d > epsilon_R)) final_small.emplace_back(run.times[k], run.grid.r[j]);
        }
    auto keep = [](std::vector<std::pair<double, double>> v) {
        if (v.size() > 20) v.resize(20);
        return v;
    };
    if (above.empty()) {
        out.kind = DichotomyResult::Kind::no_loss;
        out.pass = true;
        out.note = "heat loss <= " + fmt(epsilon_R) + " at every probe";
    } else if (nonpositive.empty() && final_small.empty()) {
        out.kind = DichotomyResult::Kind::loss_everywhere;
        out.pass = true;
        out.note = "heat loss positive at every probe and > " + fmt(epsilon_R) + " at t=" + fmt(run.times[last]);
    } else {
        out.kind = DichotomyResult::Kind::mixed;
        out.pass = false;
        const std::size_t probes = nodes.size() * records.size();
        // Report the minority as offenders.
        if (above.size() * 2 < probes) out.offending = keep(above);
        else out.offending = keep(nonpositive.empty() ? final_small : nonpositive);
        out.note = "mixed: " + std::to_string(above.size()) + " of " + std::to_string(probes) +
                   " probes lose more than " + fmt(epsilon_R);
    }
    return out;
}

Verdict plateau_verdict(const std::vector<SweepEntry>& sweep, std::string* note) {
    auto say = [&](std::string s) {
        if (note) *note = std::move(s);
    };
    if (sweep.size() < 2) {
        say("need at least two radii");
        return Verdict::inconclusive;
    }
    const double d_last = sweep.back().heat_loss;
    const double d_prev = sweep[sweep.size() - 2].heat_loss;
    if (d_last < 1e-3 && d_last <= 0.5 * d_prev) {
        say("heat loss " + fmt(d_last) + " at R=" + fmt(sweep.back().R) + ", shrinking with R");
        return Verdict::conservative_generalized;
    }
    if (d_last >= 1e-3 && std::fabs(d_last - d_prev) <= 0.1 * d_last) {
        say("heat loss plateau " + fmt(d_last) + " at R=" + fmt(sweep.back().R) + " (previous " + fmt(d_prev) + ")");
        return Verdict::not_conservative;
    }
    say("heat loss " + fmt(d_last) + " at R=" + fmt(sweep.back().R) + " neither vanishing nor stable (previous " +
        fmt(d_prev) + ")");
    return Verdict::inconclusive;
}

double volume_test_integrand(const ManifoldSpec& m, double r) {
    return std::exp(log_volume(m, Weight::rho_plus_V, r) - m.log_surface(r));
}

ConservationReport analyze(const ManifoldSpec& m, const AnalysisParams& params) {
    const auto violations = validate(m);
    if (!violations.empty()) throw ValidationError("invalid manifold: " + describe(violations));
    if (params.alphas.empty()) throw ValidationError("at least one alpha is required");

    ConservationReport rep;
    rep.spec_digest = m.digest();
    const bool has_potential = !(m.potential.is_constant() && m.potential.constant_value() == 0.0);
    const double alpha = params.alphas.front();

    auto launch = [](auto f) { return std::async(std::launch::async, std::move(f)); };
    auto volume_job = launch([&] { return generalized_volume_test(m, params.a, params.tail); });
    auto timechange_job = launch([&] { return generalized_volume_test(m.time_changed(), params.a, params.tail); });
    auto unperturbed_job = launch([&] {
        return generalized_volume_test(m.with_potential(RadialExpr::constant(0.0)), params.a, params.tail);
    });
    auto khas_job = launch([&] { return khasminskii_verdict(m, alpha, params.boundedness); });
    std::vector<std::future<KhasminskiiResult>> alpha_jobs;
    for (std::size_t i = 1; i < params.alphas.size(); ++i) {
        const double a_i = params.alphas[i];
        alpha_jobs.push_back(launch([&, a_i] { return khasminskii_verdict(m, a_i, params.boundedness); }));
    }
    auto sweep_job = launch([&] {
        SweepResult sweep = exhaustion_sweep(m, params.radii, params.t_probe, alpha, {params.cells, params.dt});
        SemigroupPlateau p;
        p.t_probe = params.t_probe;
        p.H_plateau = sweep.entries.back().H_origin;
        p.heat_loss = sweep.entries.back().heat_loss;
        p.epsilon_R = sweep.epsilon_R;
        p.sweep = sweep.entries;
        p.dichotomy = dichotomy_check(sweep.last_run, sweep.epsilon_R);
        p.verdict = plateau_verdict(sweep.entries, &p.note);
        return p;
    });
    std::optional<std::future<TailVerdict>> sturm_job;
    if (params.sturm) sturm_job = launch([&] { return sturm_test(m, params.tail); });

    rep.volume_verdict = guarded(rep.errors, "volume", volume_job);
    rep.timechange_verdict = guarded(rep.errors, "timechange", timechange_job);
    rep.unperturbed_verdict = guarded(rep.errors, "unperturbed_volume", unperturbed_job);
    rep.khasminskii = guarded(rep.errors, "khasminskii", khas_job);
    for (std::size_t i = 0; i < alpha_jobs.size(); ++i) {
        auto r = guarded(rep.errors, "khasminskii_alpha_" + fmt(params.alphas[i + 1]), alpha_jobs[i]);
        if (r) rep.khasminskii_alphas.emplace_back(params.alphas[i + 1], r->verdict);
    }
    rep.semigroup = guarded(rep.errors, "semigroup", sweep_job);
    if (sturm_job) rep.sturm = guarded(rep.errors, "sturm", *sturm_job);

    const std::optional<Verdict> v_volume =
        rep.volume_verdict ? std::optional(as_verdict(rep.volume_verdict->classification)) : std::nullopt;
    const std::optional<Verdict> v_khas = rep.khasminskii ? std::optional(rep.khasminskii->verdict) : std::nullopt;
    const std::optional<Verdict> v_semi = rep.semigroup ? std::optional(rep.semigroup->verdict) : std::nullopt;
    auto name = [](const std::optional<Verdict>& v) { return v ? std::string(to_string(*v)) : std::string("error"); };

    auto flag = [&](std::string n, bool pass, std::string detail) {
        rep.consistency.push_back({std::move(n), pass, std::move(detail)});
    };
    {
        bool same = false;
        std::string detail = "volume test or time-changed volume test failed";
        if (rep.volume_verdict && rep.timechange_verdict) {
            same = rep.volume_verdict->classification == rep.timechange_verdict->classification &&
                   rep.volume_verdict->partial_sums.size() == rep.timechange_verdict->partial_sums.size();
            for (std::size_t i = 0; same && i < rep.volume_verdict->partial_sums.size(); ++i)
                same = rep.volume_verdict->partial_sums[i].log_value == rep.timechange_verdict->partial_sums[i].log_value;
            detail = std::string(to_string(rep.volume_verdict->classification)) + " vs " +
                     to_string(rep.timechange_verdict->classification) +
                     (same ? ", identical partial sums" : ", partial sums differ");
        }
        flag("volume_timechange", same, detail);
    }
    flag("volume_khasminskii", v_volume && v_khas && *v_volume == *v_khas, name(v_volume) + " vs " + name(v_khas));
    flag("volume_semigroup", v_volume && v_semi && *v_volume == *v_semi, name(v_volume) + " vs " + name(v_semi));
    {
        bool pass = true;
        std::string detail;
        if (!has_potential) {
            detail = "V = 0";
        } else if (!rep.unperturbed_verdict) {
            pass = false;
            detail = "volume test with V = 0 failed";
        } else if (rep.unperturbed_verdict->classification == TailClass::divergent) {
            pass = v_volume != Verdict::not_conservative && v_khas != Verdict::not_conservative &&
                   v_semi != Verdict::not_conservative;
            detail = "V = 0 is conservative; with V: " + name(v_volume) + ", " + name(v_khas) + ", " + name(v_semi);
        } else {
            detail = std::string("V = 0 is ") + to_string(rep.unperturbed_verdict->classification) + "; no constraint";
        }
        flag("perturbation", pass, detail);
    }
    if (!rep.khasminskii_alphas.empty() || params.alphas.size() > 1) {
        bool pass = v_khas.has_value() && rep.khasminskii_alphas.size() + 1 == params.alphas.size();
        std::string detail = "alpha=" + fmt(alpha) + ": " + name(v_khas);
        for (const auto& [a, v] : rep.khasminskii_alphas) {
            pass = pass && v_khas && v == *v_khas;
            detail += ", alpha=" + fmt(a) + ": " + to_string(v);
        }
        flag("alpha_independence", pass, detail);
    }
    if (rep.semigroup)
        flag("dichotomy", rep.semigroup->dichotomy.pass, rep.semigroup->dichotomy.note);
    if (rep.sturm) {
        const bool sufficient = rep.sturm->classification == TailClass::divergent;
        const bool pass = !sufficient || (v_volume != Verdict::not_conservative && v_khas != Verdict::not_conservative &&
                                          v_semi != Verdict::not_conservative);
        flag("sturm_one_sided", pass, sturm_interpretation(*rep.sturm));
    }

    for (const auto& [method, message] : rep.errors) rep.disagreements.push_back(method + " failed: " + message);
    const bool all_present = v_volume && v_khas && v_semi;
    if (all_present && *v_volume == *v_khas && *v_khas == *v_semi && *v_volume != Verdict::inconclusive &&
        rep.errors.empty()) {
        rep.final = *v_volume;
    } else {
        rep.final = Verdict::inconclusive;
        if (all_present && !(*v_volume == *v_khas && *v_khas == *v_semi))
            rep.disagreements.push_back("volume: " + name(v_volume) + ", khasminskii: " + name(v_khas) +
                                        ", semigroup: " + name(v_semi));
        else if (all_present && *v_volume == Verdict::inconclusive)
            rep.disagreements.push_back("all methods inconclusive");
    }
    for (const auto& f : rep.consistency)
        if (!f.pass) rep.disagreements.push_back("flag " + f.name + " failed: " + f.detail);
    return rep;
}

RadialExpr piecewise_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("piecewise_linear needs >= 2 matching knots");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ValidationError("piecewise_linear knots must increase");
    if (!(x.front() >= 0.0)) throw ValidationError("piecewise_linear knots must be nonnegative");
    const RadialExpr r = RadialExpr::variable();
    auto segment = [&](std::size_t i) {
        const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        return RadialExpr::constant(y[i] - slope * x[i]) + RadialExpr::constant(slope) * r;
    };
    auto build = [&](auto&& self, std::size_t lo, std::size_t hi) -> RadialExpr {
        if (hi - lo == 1) return segment(lo);
        const std::size_t mid = (lo + hi) / 2;
        return RadialExpr::piecewise(x[mid], self(self, lo, mid), self(self, mid, hi));
    };
    return build(build, 0, x.size() - 1);
}

PotentialResult build_conservative_potential(const ManifoldSpec& m, PotentialStrategy strategy) {
    const ManifoldSpec base = m.with_potential(RadialExpr::constant(0.0));
    const auto violations = validate(base);
    if (!violations.empty()) throw ValidationError("invalid manifold: " + describe(violations));

    PotentialResult out;
    RadialExpr x = RadialExpr::variable();
    double threshold = 1.0;
    RadialExpr scale = RadialExpr::constant(1.0);
    if (strategy == PotentialStrategy::sturm_convex) {
        const GeometryCache cache(base, 512.0, 4096);
        const auto r1 = cache.inverse_intrinsic_distance(1.0);
        const auto far = cache.inverse_intrinsic_distance(1e4);
        if (!r1 || !far) {
            out.applicable = false;
            out.note = "intrinsic distance is bounded (d_rho(0, inf) ~ " + fmt(cache.intrinsic_distance(1e15)) +
                       "); outside the hypothesis of the large-potential construction";
            return out;
        }
        threshold = *r1;
        const double r_end = std::max(512.0, 2.0 * threshold);
        constexpr std::size_t knots = 128;
        std::vector<double> xs(knots), ds(knots);
        for (std::size_t i = 0; i < knots; ++i) {
            xs[i] = threshold * std::pow(r_end / threshold, static_cast<double>(i) / (knots - 1));
            ds[i] = cache.intrinsic_distance(xs[i]);
        }
        x = piecewise_linear(xs, ds);
        scale = base.rho;
    }
    for (int p = 4; p <= 7; ++p) {
        // f = exp(x^p) has f'(x)^2 = p^2 x^(2p-2) exp(2 x^p).
        const RadialExpr fprime2 = RadialExpr::constant(double(p) * p) *
                                   pow(x, RadialExpr::constant(2.0 * p - 2.0)) *
                                   exp(RadialExpr::constant(2.0) * pow(x, RadialExpr::constant(double(p))));
        RadialExpr body = strategy == PotentialStrategy::corollary_radial ? fprime2 : scale * fprime2;
        const RadialExpr V = RadialExpr::piecewise(threshold, RadialExpr::constant(0.0), body);
        TailVerdict retest = generalized_volume_test(base.with_potential(V));
        out.exponent = p;
        out.potential = V;
        out.retest = retest;
        if (retest.classification == TailClass::divergent) {
            out.note = "V = f'(" + std::string(strategy == PotentialStrategy::corollary_radial ? "r" : "d_rho") +
                       ")^2 with f = exp(x^" + std::to_string(p) + ") makes the volume test diverge";
            return out;
        }
    }
    throw NumericsError(std::string("potential construction did not produce a divergent volume test up to exponent 7 (") +
                        to_string(out.retest->classification) + ")");
}

}  // namespace heatcons
