#include "heatcons/manifold.hpp"

#include "heatcons/error.hpp"
#include "heatcons/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace heatcons {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double r_start = 1e-12;
constexpr double potential_ratio_cap = 1e200;

const quadrature::Tolerance volume_tol{1e-11, 1e-300, 60, 20000};

double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

enum Which { rho_w = 0, rho_plus_v_w = 1, potential_w = 2, distance_w = 3 };

}  // namespace

const char* to_string(Weight w) {
    switch (w) {
        case Weight::rho: return "rho";
        case Weight::rho_plus_V: return "rho_plus_V";
        case Weight::potential_only: return "potential_only";
    }
    return "?";
}

ManifoldSpec ManifoldSpec::from_strings(int dimension, std::string_view sigma, std::string_view rho,
                                        std::string_view potential) {
    ManifoldSpec m;
    m.dimension = dimension;
    m.sigma = RadialExpr::parse(sigma);
    m.rho = RadialExpr::parse(rho);
    m.potential = RadialExpr::parse(potential);
    return m;
}

double ManifoldSpec::log_surface(double r) const {
    return log_unit_sphere_area(dimension) + (dimension - 1) * sigma.log_eval(r);
}

RadialExpr ManifoldSpec::density_plus_potential() const { return rho + potential; }

double ManifoldSpec::weight(Weight w, double r) const {
    switch (w) {
        case Weight::rho: return rho.eval(r);
        case Weight::rho_plus_V: return density_plus_potential().eval(r);
        case Weight::potential_only: return potential.eval(r);
    }
    return 0.0;
}

double ManifoldSpec::log_weight(Weight w, double r) const {
    switch (w) {
        case Weight::rho: return rho.log_eval(r);
        case Weight::rho_plus_V: return density_plus_potential().log_eval(r);
        case Weight::potential_only: return potential.log_eval(r);
    }
    return neg_inf;
}

double ManifoldSpec::potential_ratio(double r) const {
    const double lv = potential.log_eval(r);
    if (lv == neg_inf) return 0.0;
    return std::min(std::exp(lv - rho.log_eval(r)), potential_ratio_cap);
}

double ManifoldSpec::log_surface_derivative(double r) const {
    return (dimension - 1) * sigma.derivative().eval(r) / sigma.eval(r);
}

ManifoldSpec ManifoldSpec::time_changed() const {
    ManifoldSpec out = *this;
    out.rho = density_plus_potential();
    out.potential = RadialExpr::constant(0.0);
    return out;
}

ManifoldSpec ManifoldSpec::with_potential(RadialExpr v) const {
    ManifoldSpec out = *this;
    out.potential = std::move(v);
    return out;
}

std::string ManifoldSpec::digest() const {
    std::ostringstream os;
    os << "n=" << dimension << "; sigma=" << sigma.to_string() << "; rho=" << rho.to_string()
       << "; V=" << potential.to_string();
    return os.str();
}

double log_unit_sphere_area(int n) {
    return std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n);
}

double unit_sphere_area(int n) { return std::exp(log_unit_sphere_area(n)); }

double surface_area(const ManifoldSpec& m, double r) {
    if (!(r > 0.0)) throw ValidationError("surface_area requires r > 0");
    return std::exp(m.log_surface(r));
}

double log_volume(const ManifoldSpec& m, Weight w, double r) {
    if (!(r > 0.0)) throw ValidationError("volume requires r > 0");
    if (r <= r_start) return neg_inf;
    const RadialExpr rpv = m.density_plus_potential();
    auto log_f = [&](double x) {
        const double lw = w == Weight::rho_plus_V ? rpv.log_eval(x) : m.log_weight(w, x);
        if (lw == neg_inf) return neg_inf;
        return lw + m.log_surface(x);
    };
    return quadrature::log_integrate(log_f, r_start, r, volume_tol);
}

double volume(const ManifoldSpec& m, Weight w, double r) { return std::exp(log_volume(m, w, r)); }

double intrinsic_distance(const ManifoldSpec& m, double r) {
    if (!(r > 0.0)) throw ValidationError("intrinsic_distance requires r > 0");
    if (r <= r_start) return 0.0;
    auto log_f = [&](double x) { return 0.5 * m.rho.log_eval(x); };
    return std::exp(quadrature::log_integrate(log_f, r_start, r, volume_tol));
}

std::vector<Violation> validate(const ManifoldSpec& m) {
    std::vector<Violation> out;
    if (m.dimension < 2) {
        out.push_back({0.0, "dimension >= 2", static_cast<double>(m.dimension)});
        return out;
    }
    constexpr int samples = 10000;
    const double hi = m.r_validate_max;
    const double lo = hi * 1e-7;
    bool sigma_bad = false, rho_bad = false, v_bad = false;
    for (int i = 0; i < samples && !(sigma_bad && rho_bad && v_bad); ++i) {
        const double r = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
        auto check = [&](bool& flag, const RadialExpr& e, const char* name, bool strict) {
            if (flag) return;
            try {
                const double l = e.log_eval(r);
                if (std::isnan(l) || (strict && l == neg_inf)) {
                    flag = true;
                    out.push_back({r, std::string(name) + (strict ? " > 0" : " >= 0"), e.eval(r)});
                }
            } catch (const DomainError& err) {
                flag = true;
                double value = std::numeric_limits<double>::quiet_NaN();
                try {
                    value = e.eval(r);
                } catch (const DomainError&) {
                }
                out.push_back({r, std::string(name) + (strict ? " > 0" : " >= 0"), value});
            }
        };
        check(sigma_bad, m.sigma, "sigma", true);
        check(rho_bad, m.rho, "rho", true);
        check(v_bad, m.potential, "V", false);
    }
    try {
        const double s0 = m.sigma.eval(1e-6);
        if (!(s0 < 1e-3)) out.push_back({1e-6, "sigma(0+) -> 0", s0});
    } catch (const DomainError&) {
        out.push_back({1e-6, "sigma(0+) -> 0", std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].quantity << " violated at r=" << violations[i].r << " (value " << violations[i].value
           << ")";
    }
    return os.str();
}

GeometryCache::GeometryCache(ManifoldSpec spec, double r_max, std::size_t nodes)
    : spec_(std::move(spec)), rho_plus_v_(spec_.density_plus_potential()), omega_(unit_sphere_area(spec_.dimension)) {
    if (nodes < 2 || !(r_max > r_start)) throw ValidationError("GeometryCache needs >= 2 nodes and r_max > 1e-12");
    radii_.resize(nodes);
    const double log_lo = std::log(r_start);
    const double log_hi = std::log(r_max);
    for (std::size_t k = 0; k < nodes; ++k)
        radii_[k] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(k) / (nodes - 1));
    radii_.front() = r_start;
    radii_.back() = r_max;

    auto tabulate = [&](std::vector<double>& table, int which) {
        table.assign(nodes, neg_inf);
        for (std::size_t k = 1; k < nodes; ++k) {
            const double cell = quadrature::log_integrate([&](double x) { return log_integrand(which, x); },
                                                          radii_[k - 1], radii_[k], volume_tol);
            table[k] = log_add(table[k - 1], cell);
        }
    };
    tabulate(log_v_rho_, rho_w);
    tabulate(log_v_rho_plus_v_, rho_plus_v_w);
    tabulate(log_v_potential_, potential_w);
    tabulate(log_distance_, distance_w);
}

double GeometryCache::log_integrand(int which, double x) const {
    switch (which) {
        case rho_w: return spec_.rho.log_eval(x) + spec_.log_surface(x);
        case rho_plus_v_w: return rho_plus_v_.log_eval(x) + spec_.log_surface(x);
        case potential_w: {
            const double lv = spec_.potential.log_eval(x);
            return lv == neg_inf ? neg_inf : lv + spec_.log_surface(x);
        }
        default: return 0.5 * spec_.rho.log_eval(x);
    }
}

const std::vector<double>& GeometryCache::log_volume_table(Weight w) const {
    switch (w) {
        case Weight::rho: return log_v_rho_;
        case Weight::rho_plus_V: return log_v_rho_plus_v_;
        default: return log_v_potential_;
    }
}

double GeometryCache::log_cumulative(const std::vector<double>& table, double r, int which) const {
    if (r <= radii_.front()) return neg_inf;
    const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - radii_.begin()) - 1;
    if (radii_[k] == r) return table[k];
    const double rest = quadrature::log_integrate([&](double x) { return log_integrand(which, x); }, radii_[k], r,
                                                  volume_tol);
    return log_add(table[k], rest);
}

double GeometryCache::log_volume(Weight w, double r) const {
    const int which = w == Weight::rho ? rho_w : w == Weight::rho_plus_V ? rho_plus_v_w : potential_w;
    return log_cumulative(log_volume_table(w), r, which);
}

double GeometryCache::volume(Weight w, double r) const { return std::exp(log_volume(w, r)); }

bool GeometryCache::volume_overflows(Weight w, double r) const {
    return log_volume(w, r) > std::log(std::numeric_limits<double>::max());
}

double GeometryCache::log_intrinsic_distance(double r) const { return log_cumulative(log_distance_, r, distance_w); }

double GeometryCache::intrinsic_distance(double r) const { return std::exp(log_intrinsic_distance(r)); }

double GeometryCache::volume_surface_ratio(double r) const {
    return std::exp(log_volume(Weight::rho_plus_V, r) - spec_.log_surface(r));
}

std::optional<double> GeometryCache::inverse_intrinsic_distance(double d) const {
    if (!(d > 0.0)) return 0.0;
    const double target = std::log(d);
    double lo = radii_.front();
    double hi = 0.0;
    if (target <= log_distance_.back()) {
        const auto it = std::lower_bound(log_distance_.begin(), log_distance_.end(), target);
        const std::size_t k = static_cast<std::size_t>(it - log_distance_.begin());
        if (log_distance_[k] == target) return radii_[k];
        lo = radii_[k - 1];
        hi = radii_[k];
    } else {
        // Expand past the table; a distance that stops growing is bounded.
        lo = radii_.back();
        double prev = log_distance_.back();
        for (hi = 2.0 * lo;; hi *= 2.0) {
            const double cur = log_intrinsic_distance(hi);
            if (cur >= target) break;
            if (cur - prev < 1e-13 || hi > 1e15) return std::nullopt;
            prev = cur;
            lo = hi;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double mid_safe = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
        if (log_intrinsic_distance(mid_safe) < target) lo = mid_safe;
        else hi = mid_safe;
    }
    return 0.5 * (lo + hi);
}

}  // namespace heatcons
