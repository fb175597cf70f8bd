#include "heatcons/tail_classifier.hpp"

#include "heatcons/csv.hpp"
#include "heatcons/error.hpp"
#include "heatcons/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heatcons {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
const double log_max_double = std::log(std::numeric_limits<double>::max());

double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

struct BoundedDistance {
    double total;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(TailClass c) {
    switch (c) {
        case TailClass::divergent: return "divergent";
        case TailClass::convergent: return "convergent";
        case TailClass::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// log_magnitude(R) bounds the size of the terms that cancel inside log_F near
// R; their rounding noise limits the attainable quadrature accuracy.
TailVerdict classify(const std::function<double(double)>& log_F, double a, const TailPolicy& policy,
                     const std::function<double(double)>& log_magnitude) {
    if (!(a > 0.0)) throw ValidationError("classify_tail needs a > 0");
    if (policy.horizons < 1) throw ValidationError("classify_tail needs at least one horizon");

    const quadrature::Tolerance tol{policy.quadrature_rel, 1e-300, 60, 200000};
    TailVerdict out;
    std::vector<double> log_inc;
    std::vector<double> log_R;
    double log_S = neg_inf;
    double R_prev = a;

    auto ratio = [&](std::size_t j) {
        // I_j / I_{j-1}; 0 when both vanish.
        if (log_inc[j] == neg_inf) return 0.0;
        if (log_inc[j - 1] == neg_inf) return std::numeric_limits<double>::infinity();
        return std::exp(log_inc[j] - log_inc[j - 1]);
    };
    auto finish = [&](TailClass c, std::string note) {
        out.classification = c;
        out.confidence_note = std::move(note);
        std::vector<double> xs, ys;
        for (std::size_t j = log_inc.size() > 4 ? log_inc.size() - 4 : 0; j < log_inc.size(); ++j) {
            if (log_inc[j] == neg_inf) continue;
            xs.push_back(log_R[j]);
            ys.push_back(log_inc[j]);
        }
        out.growth_exponent = fit_slope(xs, ys);
        return out;
    };

    bool stopped_early = false;
    for (int k = 1; k <= policy.horizons; ++k) {
        const double R = a * std::ldexp(1.0, k);
        if (R > policy.max_horizon) {
            stopped_early = true;
            break;
        }
        quadrature::Tolerance horizon_tol = tol;
        if (log_magnitude)
            horizon_tol.rel = std::max(tol.rel, 16.0 * std::numeric_limits<double>::epsilon() * log_magnitude(R));
        const double li = quadrature::log_integrate(log_F, R_prev, R, horizon_tol);
        R_prev = R;
        if (std::isnan(li)) throw NumericsError("integrand is not a number on [" + fmt(R / 2) + ", " + fmt(R) + "]");
        log_S = log_add(log_S, li);
        log_inc.push_back(li);
        log_R.push_back(std::log(R));
        const bool saturated = !(log_S < log_max_double);
        out.partial_sums.push_back(
            {R, saturated ? std::numeric_limits<double>::max() : std::exp(log_S), std::min(log_S, log_max_double)});
        if (saturated) {
            out.saturated = true;
            return finish(TailClass::divergent, "partial sums saturated the double range at R=" + fmt(R));
        }

        const std::size_t n = log_inc.size();
        const auto W = static_cast<std::size_t>(policy.divergence_window);
        if (n > W) {
            bool growing = true;
            for (std::size_t j = n - W; j < n && growing; ++j) growing = ratio(j) >= policy.divergence_ratio;
            if (growing)
                return finish(TailClass::divergent, "increments did not decay over the last " +
                                                        std::to_string(W) + " doublings (last ratio " +
                                                        fmt(ratio(n - 1)) + ")");
        }

        const auto C = static_cast<std::size_t>(policy.convergence_window);
        if (n >= C) {
            bool vanished = true, cauchy = true;
            for (std::size_t j = n - C; j < n; ++j) {
                vanished = vanished && log_inc[j] == neg_inf;
                const double log_S_j = out.partial_sums[j].log_value;
                cauchy = cauchy && (log_inc[j] == neg_inf || log_inc[j] - log_S_j < std::log(policy.rel_tol));
            }
            if (vanished) {
                out.limit = std::exp(log_S);
                return finish(TailClass::convergent, "integrand vanishes beyond R=" + fmt(out.partial_sums[n - C].R / 2));
            }
            if (cauchy) {
                out.limit = std::exp(log_S);
                return finish(TailClass::convergent, "increments below rel_tol of the sum for " + std::to_string(C) +
                                                         " doublings");
            }
        }
        if (n > C) {
            // Geometric tail extrapolation L_j = S_j + I_j q_j / (1 - q_j).
            bool decaying = true;
            std::vector<double> limits;
            for (std::size_t j = n - C; j < n && decaying; ++j) {
                const double q = ratio(j);
                decaying = q <= policy.convergence_ratio;
                const double S_j = out.partial_sums[j].value;
                const double I_j = std::exp(log_inc[j]);
                limits.push_back(S_j + I_j * q / (1.0 - q));
            }
            if (decaying) {
                const auto [lo, hi] = std::minmax_element(limits.begin(), limits.end());
                if (*hi - *lo <= policy.rel_tol * std::fabs(limits.back())) {
                    out.limit = limits.back();
                    return finish(TailClass::convergent, "increments decay geometrically (last ratio " +
                                                             fmt(ratio(n - 1)) + "), extrapolated limit stable");
                }
            }
        }
    }
    std::string note = "no decision after " + std::to_string(out.partial_sums.size()) + " doublings";
    if (stopped_early) note += " (stopped at the precision horizon " + fmt(policy.max_horizon) + ")";
    if (!log_inc.empty() && log_inc.size() > 1) note += ", last increment ratio " + fmt(ratio(log_inc.size() - 1));
    return finish(TailClass::inconclusive, note);
}

}  // namespace

TailVerdict classify_tail_log(const std::function<double(double)>& log_F, double a, const TailPolicy& policy) {
    return classify(log_F, a, policy, {});
}

TailVerdict classify_tail(const std::function<double(double)>& F, double a, const TailPolicy& policy) {
    auto log_F = [&](double r) {
        const double v = F(r);
        if (v < 0.0) throw DomainError("negative integrand", r, "F");
        return v == 0.0 ? neg_inf : std::log(v);
    };
    return classify_tail_log(log_F, a, policy);
}

double precision_horizon(const ManifoldSpec& m) {
    const RadialExpr w = m.density_plus_potential();
    constexpr double budget = 1e-7;
    const double eps = std::numeric_limits<double>::epsilon();
    double last_good = 0.0;
    for (int k = -10; k <= 1000; ++k) {
        const double r = std::ldexp(1.0, k);
        double mag = 0.0;
        try {
            mag = std::max(std::fabs(m.log_surface(r)), std::fabs(w.log_eval(r)));
        } catch (const DomainError&) {
            break;
        }
        if (!(mag * eps <= budget)) break;
        last_good = r;
    }
    return last_good;
}

namespace {

void require_valid(const ManifoldSpec& m) {
    const auto v = validate(m);
    if (!v.empty()) throw ValidationError("invalid manifold: " + describe(v));
}

}  // namespace

TailVerdict generalized_volume_test(const ManifoldSpec& m, double a, const TailPolicy& policy) {
    require_valid(m);
    if (!(a > 0.0)) throw ValidationError("generalized_volume_test needs a > 0");
    TailPolicy p = policy;
    p.max_horizon = std::min(p.max_horizon, precision_horizon(m));
    const double r_cache = std::max(std::min(a * std::ldexp(1.0, p.horizons), p.max_horizon), 2.0 * a);
    const GeometryCache cache(m, r_cache, 4096);
    auto log_F = [&](double r) { return cache.log_volume(Weight::rho_plus_V, r) - m.log_surface(r); };
    auto magnitude = [&](double r) { return std::fabs(m.log_surface(r)) + std::fabs(cache.log_volume(Weight::rho_plus_V, r)); };
    return classify(log_F, a, p, magnitude);
}

TailVerdict sturm_test(const ManifoldSpec& m, const TailPolicy& policy) {
    require_valid(m);
    const GeometryCache cache(m, 512.0, 4096);
    auto log_G = [&](double R) {
        const auto r = cache.inverse_intrinsic_distance(R);
        if (!r) throw BoundedDistance{cache.intrinsic_distance(1e15)};
        const double log_nu = cache.log_volume(Weight::rho, *r);
        return std::log(R) - std::log(std::max(log_nu, 1.0));
    };
    try {
        TailVerdict v = classify_tail_log(log_G, 1.0, policy);
        return v;
    } catch (const BoundedDistance& b) {
        TailVerdict v;
        v.classification = TailClass::inconclusive;
        v.confidence_note = "intrinsic distance is bounded (d_rho(0, inf) ~ " + fmt(b.total) +
                            "), so large intrinsic balls do not exist";
        return v;
    }
}

std::string sturm_interpretation(const TailVerdict& v) {
    return v.classification == TailClass::divergent ? "conservative (sufficient condition)" : "test silent";
}

void write_partial_sums_csv(std::ostream& os, const TailVerdict& v) {
    csv::Writer w(os);
    w.header({"R", "partial_integral"});
    for (const auto& p : v.partial_sums) w.row(p.R, p.value);
}

}  // namespace heatcons
