#include "heatcons/eigen_ode.hpp"

#include "heatcons/csv.hpp"
#include "heatcons/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heatcons {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double inf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

struct Coefficients {
    double phi1, P, B1, B2;
};

// Weights of the exponentially fitted cell update for L = log s varying by z
// across the cell: phi1 = (1 - e^-z)/z, P = (1 - e^-z (1 + z))/z^2,
// B1 = (1/2 - P)/z, B2 = (1/2 - phi1 + P)/z. Power series near z = 0.
Coefficients coefficients(double z) {
    Coefficients c{};
    if (std::fabs(z) < 0.05) {
        double term = 1.0;  // (-z)^k / k!
        for (int k = 0; k < 12; ++k) {
            c.phi1 += term / (k + 1);
            c.P += term / (k + 2);
            c.B1 += term / ((k + 1.0) * (k + 3.0));
            c.B2 += term / ((k + 1.0) * (k + 2.0) * (k + 3.0));
            term *= -z / (k + 1);
        }
        return c;
    }
    const double em = std::exp(-z);
    c.phi1 = -std::expm1(-z) / z;
    c.P = (1.0 - em * (1.0 + z)) / (z * z);
    c.B1 = (0.5 - c.P) / z;
    c.B2 = (0.5 - (c.phi1 - c.P)) / z;
    return c;
}

struct State {
    double u = 0.0;  // f - 1
    double psi = 0.0;
    bool saturated = false;
};

class Stepper {
public:
    explicit Stepper(const RadialProblem& p) : p_(p) {}

    void step(double r0, double r1, double L0, double L1, double lw0, double lw1, State& s, int depth = 0) const {
        if (s.saturated) return;
        if (lw1 == inf) {
            s.saturated = true;
            return;
        }
        const double w0 = std::exp(lw0);
        const double w1 = std::exp(lw1);
        const double h = r1 - r0;
        const Coefficients c = coefficients(L1 - L0);
        const double implicit = h * h * c.B2 * w1;
        if (implicit > 0.25 && depth < 60) {
            const double rm = std::sqrt(r0 * r1);
            const double Lm = p_.log_surface(rm);
            const double lwm = p_.log_source(rm);
            step(r0, rm, L0, Lm, lw0, lwm, s, depth + 1);
            step(rm, r1, Lm, L1, lwm, lw1, s, depth + 1);
            return;
        }
        if (!(implicit < 1.0)) throw NumericsError("radial stepper cannot resolve the source near r=" + std::to_string(r1));
        const double f0 = 1.0 + s.u;
        const double g0 = w0 * f0;
        const double u1 = (s.u + h * c.phi1 * s.psi + h * h * c.B1 * g0 + implicit) / (1.0 - implicit);
        const double psi1 = std::exp(-(L1 - L0)) * s.psi + h * (c.P * g0 + (c.phi1 - c.P) * w1 * (1.0 + u1));
        if (!(1.0 + u1 < saturation_value) || !std::isfinite(psi1)) {
            s.saturated = true;
            return;
        }
        s.u = u1;
        s.psi = psi1;
    }

private:
    const RadialProblem& p_;
};

struct RawSolution {
    std::vector<double> r, u, psi, L;
    std::size_t first_saturated;
};

RawSolution integrate(const RadialProblem& p, const std::vector<double>& grid) {
    if (grid.size() < 2) throw ValidationError("radial grid needs at least two nodes");
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1])) throw ValidationError("radial grid must be strictly increasing");
    if (!(grid.front() > 0.0)) throw ValidationError("radial grid must start at r > 0");

    RawSolution out;
    out.r = grid;
    out.u.assign(grid.size(), 0.0);
    out.psi.assign(grid.size(), 0.0);
    out.L.resize(grid.size());
    out.first_saturated = grid.size();
    const Stepper stepper(p);
    State s;
    double L_prev = p.log_surface(grid[0]);
    double lw_prev = p.log_source(grid[0]);
    out.L[0] = L_prev;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double L = p.log_surface(grid[j]);
        const double lw = p.log_source(grid[j]);
        out.L[j] = L;
        stepper.step(grid[j - 1], grid[j], L_prev, L, lw_prev, lw, s);
        if (s.saturated) {
            out.first_saturated = j;
            for (std::size_t k = j; k < grid.size(); ++k) {
                out.u[k] = saturation_value;
                out.psi[k] = inf;
                if (k > j) out.L[k] = p.log_surface(grid[k]);
            }
            break;
        }
        out.u[j] = s.u;
        out.psi[j] = s.psi;
        L_prev = L;
        lw_prev = lw;
    }
    return out;
}

double flux_of(double L, double psi) {
    if (psi == 0.0) return 0.0;
    if (psi == inf) return inf;
    return std::exp(L + std::log(psi));
}

RadialSolution finish(const RawSolution& raw, double alpha) {
    RadialSolution out;
    out.alpha = alpha;
    out.grid = raw.r;
    const std::size_t n = raw.r.size();
    out.values.resize(n);
    out.flux.resize(n);
    out.slope = raw.psi;
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = j >= raw.first_saturated ? saturation_value : 1.0 + raw.u[j];
        out.flux[j] = flux_of(raw.L[j], raw.psi[j]);
    }
    if (raw.first_saturated < n) out.blowup_radius = raw.r[raw.first_saturated];
    return out;
}

RadialProblem eigen_problem(const ManifoldSpec& m, double alpha) {
    const double log_alpha = std::log(alpha);
    return RadialProblem{
        [m](double r) { return m.log_surface(r); },
        [m, log_alpha](double r) { return log_add(log_alpha + m.rho.log_eval(r), m.potential.log_eval(r)); }};
}

void require_valid(const ManifoldSpec& m) {
    const auto v = validate(m);
    if (!v.empty()) throw ValidationError("invalid manifold: " + describe(v));
}

}  // namespace

std::vector<double> geometric_grid(double r_min, double R, std::size_t nodes) {
    if (nodes < 2 || !(r_min > 0.0) || !(R > r_min)) throw ValidationError("geometric grid needs 0 < r_min < R and >= 2 nodes");
    std::vector<double> g(nodes);
    const double lr = std::log(R / r_min);
    for (std::size_t j = 0; j < nodes; ++j) g[j] = r_min * std::exp(lr * static_cast<double>(j) / (nodes - 1));
    g.front() = r_min;
    g.back() = R;
    return g;
}

RadialSolution solve_radial(const RadialProblem& p, const std::vector<double>& grid) {
    return finish(integrate(p, grid), 1.0);
}

RadialSolution solve_radial_eigen(const ManifoldSpec& m, double alpha, double R, std::size_t M, bool richardson) {
    require_valid(m);
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(R > default_r_min)) throw ValidationError("R must exceed r_min = 1e-6");
    if (M < 64) throw ValidationError("at least 64 nodes are required");
    const RadialProblem p = eigen_problem(m, alpha);
    const auto coarse_grid = geometric_grid(default_r_min, R, M);
    RawSolution coarse = integrate(p, coarse_grid);
    if (!richardson) return finish(coarse, alpha);

    std::vector<double> fine_grid(2 * M - 1);
    for (std::size_t j = 0; j < M; ++j) {
        fine_grid[2 * j] = coarse_grid[j];
        if (j + 1 < M) fine_grid[2 * j + 1] = std::sqrt(coarse_grid[j] * coarse_grid[j + 1]);
    }
    const RawSolution fine = integrate(p, fine_grid);

    RawSolution rich = coarse;
    rich.first_saturated = M;
    for (std::size_t j = 0; j < M; ++j) {
        if (j >= coarse.first_saturated || 2 * j >= fine.first_saturated) {
            rich.first_saturated = j;
            break;
        }
        rich.u[j] = (4.0 * fine.u[2 * j] - coarse.u[j]) / 3.0;
        rich.psi[j] = (4.0 * fine.psi[2 * j] - coarse.psi[j]) / 3.0;
    }
    for (std::size_t j = rich.first_saturated; j < M; ++j) {
        rich.u[j] = saturation_value;
        rich.psi[j] = inf;
    }
    RadialSolution out = finish(rich, alpha);
    for (std::size_t j = 1; j < rich.first_saturated; ++j) {
        if (rich.u[j] < rich.u[j - 1] || out.flux[j] < out.flux[j - 1] || rich.u[j] < 0.0) {
            std::ostringstream os;
            os << "grid too coarse: extrapolated solution is not monotone near r=" << coarse_grid[j]
               << "; refine beyond M=" << M;
            throw NumericsError(os.str());
        }
    }
    return out;
}

KhasminskiiResult khasminskii_verdict(const ManifoldSpec& m, double alpha, const BoundednessPolicy& policy) {
    require_valid(m);
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(policy.r_max >= 2.0)) throw ValidationError("boundedness policy needs r_max >= 2");
    const std::size_t per = std::max<std::size_t>(policy.cells_per_doubling, 8);

    // Nested grid: every R_k = 2^k is a node, so one forward solve yields
    // f on each horizon exactly as separate solves would.
    std::vector<double> grid = geometric_grid(default_r_min, 1.0, 2 * per + 1);
    std::vector<std::size_t> sample_index{grid.size() - 1};
    std::vector<double> sample_R{1.0};
    for (double R = 1.0; 2.0 * R <= policy.r_max * (1 + 1e-12); R *= 2.0) {
        const auto piece = geometric_grid(R, 2.0 * R, per + 1);
        grid.insert(grid.end(), piece.begin() + 1, piece.end());
        sample_index.push_back(grid.size() - 1);
        sample_R.push_back(2.0 * R);
    }
    const RadialSolution sol = finish(integrate(eigen_problem(m, alpha), grid), alpha);

    KhasminskiiResult out;
    out.blowup_radius = sol.blowup_radius;
    std::vector<double> f;
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(6);
        os << v;
        return os.str();
    };
    for (std::size_t k = 0; k < sample_index.size(); ++k) {
        const double fk = sol.values[sample_index[k]];
        f.push_back(fk);
        out.samples.emplace_back(sample_R[k], fk);
        if (fk >= saturation_value) {
            out.verdict = Verdict::conservative_generalized;
            out.note = "f reached 1e300 at r=" + fmt(*sol.blowup_radius);
            return out;
        }
        const std::size_t n = f.size();
        const auto G = static_cast<std::size_t>(policy.growth_window);
        if (n > G) {
            bool growing = true;
            for (std::size_t j = n - G; j < n && growing; ++j) growing = f[j] >= policy.growth_factor * f[j - 1];
            if (growing) {
                out.verdict = Verdict::conservative_generalized;
                out.note = "f(2R)/f(R) >= " + fmt(policy.growth_factor) + " over the last " + std::to_string(G) +
                           " doublings (f(" + fmt(sample_R[k]) + ") = " + fmt(fk) + ")";
                return out;
            }
        }
        // Increment ratios q_j = d_j / d_{j-1}, d_j = f_j - f_{j-1}.
        auto d = [&](std::size_t j) { return f[j] - f[j - 1]; };
        auto q = [&](std::size_t j) { return d(j - 1) > 0.0 ? d(j) / d(j - 1) : (d(j) > 0.0 ? inf : 0.0); };
        const auto D = static_cast<std::size_t>(policy.divergence_window);
        if (n > D + 1) {
            bool steady = true;
            for (std::size_t j = n - D; j < n && steady; ++j) steady = q(j) >= policy.divergence_ratio;
            if (steady) {
                out.verdict = Verdict::conservative_generalized;
                out.note = "increments of f did not decay over the last " + std::to_string(D) + " doublings";
                return out;
            }
        }
        const auto S = static_cast<std::size_t>(policy.stagnation_window);
        if (n > S + 1) {
            bool decaying = true;
            std::vector<double> limits;
            for (std::size_t j = n - S; j < n && decaying; ++j) {
                const double qj = q(j);
                decaying = qj <= policy.stagnation_ratio;
                limits.push_back(f[j] + d(j) * qj / (1.0 - qj));
            }
            if (decaying) {
                const auto [lo, hi] = std::minmax_element(limits.begin(), limits.end());
                if (*hi - *lo <= policy.stagnation_rel * limits.back()) {
                    out.verdict = Verdict::not_conservative;
                    out.bound = limits.back();
                    out.note = "f levels off at about " + fmt(limits.back()) + " (last increment ratio " +
                               fmt(q(n - 1)) + ")";
                    return out;
                }
            }
        }
    }
    out.note = "no decision up to R=" + fmt(sample_R.back()) + " (f = " + fmt(f.back()) + ")";
    return out;
}

void write_solution_csv(std::ostream& os, const RadialSolution& s) {
    csv::Writer w(os);
    w.header({"r", "f", "flux"});
    for (std::size_t j = 0; j < s.grid.size(); ++j) w.row(s.grid[j], s.values[j], s.flux[j]);
}

}  // namespace heatcons
