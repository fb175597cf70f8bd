#include "heatcons/semigroup.hpp"

#include "heatcons/csv.hpp"
#include "heatcons/error.hpp"
#include "heatcons/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace heatcons {

namespace {

constexpr double r_min = 1e-6;
constexpr double r_pole = 1e-12;
constexpr std::size_t geometric_cells = 100;
constexpr double width_ratio = 1.05;

const quadrature::Tolerance cell_tol{1e-11, 1e-300, 60, 20000};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Forward elimination coefficients for a diagonally dominant tridiagonal
// matrix with diagonal d, superdiagonal u and subdiagonal l.
struct Factorization {
    std::vector<double> cprime, inv_denom, sub;

    Factorization(const std::vector<double>& d, const std::vector<double>& u, const std::vector<double>& l) {
        const std::size_t n = d.size();
        cprime.resize(n);
        inv_denom.resize(n);
        sub = l;
        double prev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double denom = d[j] - (j ? l[j] * prev : 0.0);
            if (!(denom > 0.0)) throw NumericsError("singular tridiagonal system at row " + std::to_string(j));
            inv_denom[j] = 1.0 / denom;
            cprime[j] = j + 1 < n ? u[j] * inv_denom[j] : 0.0;
            prev = cprime[j];
        }
    }

    // In place; x has at least n entries.
    void solve(std::vector<double>& x) const {
        const std::size_t n = cprime.size();
        x[0] *= inv_denom[0];
        for (std::size_t j = 1; j < n; ++j) x[j] = (x[j] - sub[j] * x[j - 1]) * inv_denom[j];
        for (std::size_t j = n - 1; j-- > 0;) x[j] -= cprime[j] * x[j + 1];
    }
};

void check_run_args(double t_end, double dt) {
    if (!(t_end > 0.0)) throw ValidationError("t_end must be positive");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (dt > t_end) throw ValidationError("dt must not exceed t_end");
}

}  // namespace

std::vector<double> RadialGrid::weights() const {
    std::vector<double> w(log_weight.size());
    std::transform(log_weight.begin(), log_weight.end(), w.begin(), [](double l) { return std::exp(l); });
    return w;
}

std::vector<double> RadialGrid::conductances() const {
    std::vector<double> c(log_conductance.size());
    std::transform(log_conductance.begin(), log_conductance.end(), c.begin(), [](double l) { return std::exp(l); });
    return c;
}

RadialGrid RadialGrid::truncate(std::size_t K) const {
    if (K < 2 || K > cells()) throw ValidationError("truncation index out of range");
    RadialGrid g;
    g.r.assign(r.begin(), r.begin() + K + 1);
    g.faces.assign(faces.begin(), faces.begin() + K);
    g.log_weight.assign(log_weight.begin(), log_weight.begin() + K + 1);
    g.log_conductance.assign(log_conductance.begin(), log_conductance.begin() + K);
    g.vhat.assign(vhat.begin(), vhat.begin() + K + 1);
    g.upper.assign(upper.begin(), upper.begin() + K);
    g.lower.assign(lower.begin(), lower.begin() + K);
    return g;
}

RadialGrid build_grid(const ManifoldSpec& m, double R, std::size_t M) {
    if (!(R > 10 * r_min)) throw ValidationError("grid radius must exceed 1e-5");
    if (M < 64) throw ValidationError("at least 64 cells are required");
    {
        const double ls = m.log_surface(R);
        if (!std::isfinite(ls))
            throw ValidationError("log s(R) is not finite at R=" + fmt(R) + "; use a smaller R");
    }
    RadialGrid g;
    std::vector<double> rel(M);
    double total = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        rel[j] = j < geometric_cells ? std::pow(width_ratio, static_cast<double>(j) - geometric_cells) : 1.0;
        total += rel[j];
    }
    const double unit = (R - r_min) / total;
    g.r.resize(M + 1);
    g.r[0] = r_min;
    double acc = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
        acc += rel[j];
        g.r[j + 1] = r_min + unit * acc;
    }
    g.r[M] = R;

    g.faces.resize(M);
    g.log_conductance.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
        g.faces[j] = 0.5 * (g.r[j] + g.r[j + 1]);
        g.log_conductance[j] = m.log_surface(g.faces[j]) - std::log(g.r[j + 1] - g.r[j]);
    }
    auto log_density = [&](double x) { return m.rho.log_eval(x) + m.log_surface(x); };
    g.log_weight.resize(M + 1);
    for (std::size_t j = 0; j <= M; ++j) {
        const double a = j == 0 ? r_pole : g.faces[j - 1];
        const double b = j == M ? R : g.faces[j];
        g.log_weight[j] = quadrature::log_integrate(log_density, a, b, cell_tol);
        if (!std::isfinite(g.log_weight[j]))
            throw NumericsError("cell weight is not finite near r=" + fmt(g.r[j]));
    }
    g.vhat.resize(M + 1);
    for (std::size_t j = 0; j <= M; ++j) g.vhat[j] = m.potential_ratio(g.r[j]);
    g.upper.resize(M);
    g.lower.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
        g.upper[j] = std::exp(g.log_conductance[j] - g.log_weight[j]);
        g.lower[j] = j == 0 ? 0.0 : std::exp(g.log_conductance[j - 1] - g.log_weight[j]);
        if (!(g.upper[j] > 0.0) || !std::isfinite(g.upper[j]) || !std::isfinite(g.lower[j]))
            throw NumericsError("conductance ratio out of range near r=" + fmt(g.r[j]));
    }
    return g;
}

std::vector<double> apply_operator(const RadialGrid& g, const std::vector<double>& f) {
    const std::size_t M = g.cells();
    if (f.size() != M + 1) throw ValidationError("state length must equal the node count");
    std::vector<double> out(M + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        const double right = j + 1 < M ? f[j + 1] : 0.0;
        const double left = j > 0 ? f[j - 1] : f[j];
        out[j] = g.upper[j] * (right - f[j]) - g.lower[j] * (f[j] - left) - g.vhat[j] * f[j];
    }
    return out;
}

HeatStepper::HeatStepper(const RadialGrid& g, double dt, TimeScheme scheme)
    : upper_(g.upper), lower_(g.lower), vhat_(g.vhat), dt_(dt), scheme_(scheme) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const std::size_t M = g.cells();
    const double theta = scheme == TimeScheme::implicit_euler ? 1.0 : 0.5;
    if (scheme == TimeScheme::crank_nicolson) {
        double limit = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j) limit = std::min(limit, 1.0 / (g.upper[j] + g.lower[j]));
        if (dt > limit) throw ValidationError("Crank-Nicolson needs dt <= " + fmt(limit));
    }
    std::vector<double> d(M), u(M), l(M);
    for (std::size_t j = 0; j < M; ++j) {
        d[j] = 1.0 + theta * dt * (g.upper[j] + g.lower[j] + g.vhat[j]);
        u[j] = -theta * dt * g.upper[j];
        l[j] = -theta * dt * g.lower[j];
    }
    Factorization f(d, u, l);
    cprime_ = std::move(f.cprime);
    inv_denom_ = std::move(f.inv_denom);
    sub_ = std::move(f.sub);
}

void HeatStepper::advance(std::vector<double>& state, const std::vector<double>* source) const {
    const std::size_t M = cprime_.size();
    if (state.size() != M + 1) throw ValidationError("state length must equal the node count");
    if (source && source->size() != M + 1) throw ValidationError("source length must equal the node count");
    if (scheme_ == TimeScheme::crank_nicolson) {
        std::vector<double> rhs(M + 1, 0.0);
        for (std::size_t j = 0; j < M; ++j) {
            const double right = j + 1 < M ? state[j + 1] : 0.0;
            const double left = j > 0 ? state[j - 1] : state[j];
            const double Af = upper_[j] * (right - state[j]) - lower_[j] * (state[j] - left) - vhat_[j] * state[j];
            rhs[j] = state[j] + 0.5 * dt_ * Af;
        }
        state.swap(rhs);
    }
    if (source)
        for (std::size_t j = 0; j < M; ++j) state[j] += dt_ * (*source)[j];
    state[0] *= inv_denom_[0];
    for (std::size_t j = 1; j < M; ++j) state[j] = (state[j] - sub_[j] * state[j - 1]) * inv_denom_[j];
    for (std::size_t j = M - 1; j-- > 0;) state[j] -= cprime_[j] * state[j + 1];
    state[M] = 0.0;
}

std::vector<double> step_heat(const RadialGrid& g, const std::vector<double>& state, double dt,
                              const std::vector<double>& source) {
    HeatStepper stepper(g, dt);
    std::vector<double> out = state;
    stepper.advance(out, &source);
    return out;
}

SemigroupRun run_H(const RadialGrid& g, double t_end, double dt, const RunOptions& opts) {
    check_run_args(t_end, dt);
    const std::size_t M = g.cells();
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(t_end / dt)));
    const double h = t_end / static_cast<double>(steps);
    const std::size_t stride = opts.record_stride ? opts.record_stride : std::max<std::size_t>(1, (steps + 199) / 200);
    const HeatStepper stepper(g, h, opts.scheme);

    SemigroupRun run;
    run.grid = g;
    run.dt = h;
    run.steps = steps;

    std::vector<double> U(M + 1, 1.0), W(M + 1, 0.0), H(M + 1, 1.0), D(M + 1, 0.0);
    U[M] = H[M] = 0.0;
    D[M] = 1.0;
    std::vector<double> vhat = g.vhat;
    vhat[M] = 0.0;
    // Boundary inflow of the deficit: D' = A D + b, b_{M-1} = c_{M-1/2}/w_{M-1}.
    std::vector<double> b(M + 1, 0.0);
    b[M - 1] = g.upper[M - 1];

    struct Laplace {
        double alpha;
        std::vector<double> acc;
    };
    std::vector<Laplace> laplace;
    for (double a : opts.laplace_alphas) {
        if (!(a > 0.0)) throw ValidationError("Laplace alphas must be positive");
        laplace.push_back({a, std::vector<double>(M + 1, 0.0)});
    }

    auto record = [&](std::size_t k) {
        run.times.push_back(h * static_cast<double>(k));
        run.U.push_back(U);
        run.W.push_back(W);
        run.H.push_back(H);
        std::vector<double> d = D;
        d[M] = 1.0;
        run.deficit.push_back(std::move(d));
        run.heat_loss_at_origin.push_back(D[0]);
    };
    record(0);

    std::vector<double> H_prev;
    for (std::size_t k = 1; k <= steps; ++k) {
        H_prev = H;
        stepper.advance(U, nullptr);
        stepper.advance(W, &vhat);
        stepper.advance(H, &vhat);
        stepper.advance(D, &b);
        for (std::size_t j = 0; j < M; ++j) {
            const double gap = std::fabs(H[j] - (U[j] + W[j]));
            run.duhamel_gap = std::max(run.duhamel_gap, gap);
            if (!(H[j] <= 1.0 + 1e-8) || !(U[j] >= 0.0) || !(W[j] >= 0.0) || !(H[j] >= 0.0))
                throw NumericsError("heat content left [0, 1] at r=" + fmt(g.r[j]) + ", t=" +
                                    fmt(h * static_cast<double>(k)) + " (H=" + fmt(H[j]) + ")");
        }
        if (run.duhamel_gap > 1e-10)
            throw NumericsError("one-pass H differs from U + W by " + fmt(run.duhamel_gap));
        for (Laplace& L : laplace) {
            // Exact weights of alpha e^{-alpha t} against H linear on the step.
            const double x = L.alpha * h;
            const double E = std::exp(-L.alpha * h * static_cast<double>(k - 1));
            const double total = -E * std::expm1(-x);
            const double wb = E * (-std::expm1(-x) - x * std::exp(-x)) / x;
            const double wa = total - wb;
            for (std::size_t j = 0; j <= M; ++j) L.acc[j] += wa * H_prev[j] + wb * H[j];
        }
        if (k % stride == 0 || k == steps) record(k);
    }
    for (Laplace& L : laplace) run.laplace.emplace_back(L.alpha, std::move(L.acc));
    return run;
}

SemigroupRun run_H(const ManifoldSpec& m, double R, std::size_t M, double t_end, double dt, const RunOptions& opts) {
    const auto v = validate(m);
    if (!v.empty()) throw ValidationError("invalid manifold: " + describe(v));
    check_run_args(t_end, dt);
    return run_H(build_grid(m, R, M), t_end, dt, opts);
}

namespace {

std::vector<double> resolvent_solve(const RadialGrid& g, double alpha, std::vector<double> rhs) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    const std::size_t M = g.cells();
    std::vector<double> d(M), u(M), l(M);
    for (std::size_t j = 0; j < M; ++j) {
        d[j] = alpha + g.upper[j] + g.lower[j] + g.vhat[j];
        u[j] = -g.upper[j];
        l[j] = -g.lower[j];
    }
    Factorization(d, u, l).solve(rhs);
    rhs[M] = 0.0;
    return rhs;
}

}  // namespace

std::vector<double> run_N(const RadialGrid& g, double alpha) {
    const std::size_t M = g.cells();
    std::vector<double> rhs(M + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) rhs[j] = alpha + g.vhat[j];
    auto N = resolvent_solve(g, alpha, std::move(rhs));
    for (std::size_t j = 0; j <= M; ++j)
        if (!(N[j] >= 0.0 && N[j] <= 1.0 + 1e-12))
            throw NumericsError("resolvent function left [0, 1] at r=" + fmt(g.r[j]) + " (N=" + fmt(N[j]) + ")");
    return N;
}

std::vector<double> run_N(const ManifoldSpec& m, double alpha, double R, std::size_t M) {
    const auto v = validate(m);
    if (!v.empty()) throw ValidationError("invalid manifold: " + describe(v));
    return run_N(build_grid(m, R, M), alpha);
}

std::vector<double> resolvent_deficit(const RadialGrid& g, double alpha) {
    const std::size_t M = g.cells();
    std::vector<double> rhs(M + 1, 0.0);
    rhs[M - 1] = g.upper[M - 1];
    auto D = resolvent_solve(g, alpha, std::move(rhs));
    D[M] = 1.0;
    return D;
}

double laplace_consistency(const SemigroupRun& run, const std::vector<double>& N, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (run.times.empty() || run.H.empty()) throw ValidationError("empty semigroup run");
    const double T = run.times.back();
    if (alpha * T < 20.0) throw ValidationError("t_end * alpha = " + fmt(alpha * T) + " < 20; extend t_end");
    const std::size_t n = run.H.back().size();
    if (N.size() != n) throw ValidationError("N and the run live on different grids");

    std::vector<double> transform;
    for (const auto& [a, acc] : run.laplace)
        if (a == alpha) transform = acc;
    if (transform.empty()) {
        transform.assign(n, 0.0);
        for (std::size_t k = 1; k < run.times.size(); ++k) {
            const double h = run.times[k] - run.times[k - 1];
            const double x = alpha * h;
            const double E = std::exp(-alpha * run.times[k - 1]);
            const double total = -E * std::expm1(-x);
            const double wb = E * (-std::expm1(-x) - x * std::exp(-x)) / x;
            const double wa = total - wb;
            for (std::size_t j = 0; j < n; ++j) transform[j] += wa * run.H[k - 1][j] + wb * run.H[k][j];
        }
    }
    const double tail = std::exp(-alpha * T);
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j)
        worst = std::max(worst, std::fabs(transform[j] + tail * run.H.back()[j] - N[j]));
    return worst;
}

SweepResult exhaustion_sweep(const ManifoldSpec& m, const std::vector<double>& radii, double t_probe, double alpha,
                             const SweepOptions& opts) {
    if (radii.empty()) throw ValidationError("exhaustion sweep needs at least one radius");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw ValidationError("radii must be strictly increasing");
    const auto v = validate(m);
    if (!v.empty()) throw ValidationError("invalid manifold: " + describe(v));
    check_run_args(t_probe, opts.dt);

    const RadialGrid master = build_grid(m, radii.back(), opts.cells);
    std::vector<std::size_t> cut;
    for (double R : radii) {
        const auto it = std::lower_bound(master.r.begin(), master.r.end(), R);
        std::size_t K = static_cast<std::size_t>(it - master.r.begin());
        if (K > 0 && (K == master.r.size() || R - master.r[K - 1] < master.r[K] - R)) --K;
        if (K < 64) throw ValidationError("radius " + fmt(R) + " is too small for the sweep grid");
        if (!cut.empty() && K <= cut.back()) throw ValidationError("radii are closer than one grid cell");
        cut.push_back(K);
    }

    struct Item {
        SemigroupRun run;
        std::vector<double> N, ND;
    };
    std::vector<std::future<Item>> jobs;
    for (std::size_t K : cut)
        jobs.push_back(std::async(std::launch::async, [&, K] {
            RadialGrid g = K == master.cells() ? master : master.truncate(K);
            Item it;
            it.N = run_N(g, alpha);
            it.ND = resolvent_deficit(g, alpha);
            it.run = run_H(g, t_probe, opts.dt);
            return it;
        }));
    std::vector<Item> items;
    for (auto& j : jobs) items.push_back(j.get());

    SweepResult out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& run = items[i].run;
        out.entries.push_back({run.grid.radius(), run.grid.cells(), run.H.back()[0], items[i].N[0],
                               run.heat_loss_at_origin.back(), items[i].ND[0]});
    }
    for (std::size_t i = 1; i < out.entries.size(); ++i) {
        const auto& a = out.entries[i - 1];
        const auto& b = out.entries[i];
        if (b.H_origin < a.H_origin - 1e-8 || b.N_origin < a.N_origin - 1e-8)
            throw NumericsError("exhaustion is not monotone between R=" + fmt(a.R) + " and R=" + fmt(b.R) +
                                "; refine the grid");
    }
    if (items.size() >= 2) {
        const auto& last = items.back().run;
        const auto& prev = items[items.size() - 2].run;
        const double limit = last.grid.radius() / 4.0;
        double eps = 0.0;
        for (std::size_t j = 0; j < prev.grid.cells() && last.grid.r[j] <= limit; ++j)
            eps = std::max(eps, std::fabs(prev.deficit.back()[j] - last.deficit.back()[j]));
        out.epsilon_R = std::max(eps, 1e-12);
    }
    out.last_run = std::move(items.back().run);
    return out;
}

void write_run_csv(std::ostream& os, const SemigroupRun& run) {
    csv::Writer w(os);
    w.header({"t", "r", "U", "W", "H"});
    for (std::size_t k = 0; k < run.times.size(); ++k)
        for (std::size_t j = 0; j < run.grid.r.size(); ++j)
            w.row(run.times[k], run.grid.r[j], run.U[k][j], run.W[k][j], run.H[k][j]);
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    csv::Writer w(os);
    w.header({"R", "H_origin", "N_origin"});
    for (const auto& e : sweep.entries) w.row(e.R, e.H_origin, e.N_origin);
}

}  // namespace heatcons
