#pragma once

#include "heatcons/manifold.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace heatcons {

/// Finite-volume discretization of L_{rho,V} on the ball B_R. Nodes
/// r_0 = 1e-6 < ... < r_M = R; node M carries the Dirichlet condition and
/// cell 0 extends down to the pole, where the flux vanishes. Weights and
/// conductances are stored as logarithms, so that s(r) may exceed the
/// double range.
struct RadialGrid {
    std::vector<double> r;
    /// r_{j+1/2}, j = 0..M-1.
    std::vector<double> faces;
    /// log of w_j, the integral of rho s over cell j, j = 0..M.
    std::vector<double> log_weight;
    /// log of c_{j+1/2} = s(r_{j+1/2}) / (r_{j+1} - r_j).
    std::vector<double> log_conductance;
    /// V/rho at the nodes, capped at 1e200.
    std::vector<double> vhat;
    /// c_{j+1/2}/w_j and c_{j-1/2}/w_j for the unknowns j = 0..M-1.
    std::vector<double> upper;
    std::vector<double> lower;

    std::size_t cells() const noexcept { return r.size() - 1; }
    double radius() const noexcept { return r.back(); }
    std::vector<double> weights() const;
    std::vector<double> conductances() const;
    /// The same discretization on B_{r_K}: nodes 0..K, with node K now
    /// Dirichlet. Interior rows are unchanged, so truncations are nested.
    RadialGrid truncate(std::size_t K) const;
};

/// Widths grow geometrically by 1.05 over the first 100 cells and are
/// uniform afterwards.
RadialGrid build_grid(const ManifoldSpec& m, double R, std::size_t M);

/// (A f)_j for j < M, with f_M taken as 0; entry M of the result is 0.
std::vector<double> apply_operator(const RadialGrid& g, const std::vector<double>& f);

enum class TimeScheme { implicit_euler, crank_nicolson };

/// Factorized tridiagonal solve for one (grid, dt, scheme).
class HeatStepper {
public:
    /// Crank-Nicolson requires dt <= min_j 1/(upper_j + lower_j).
    HeatStepper(const RadialGrid& g, double dt, TimeScheme scheme = TimeScheme::implicit_euler);

    /// One step of du/dt = A u + source; entry M of `state` is overwritten with 0.
    void advance(std::vector<double>& state, const std::vector<double>* source) const;
    double dt() const noexcept { return dt_; }

private:
    std::vector<double> upper_, lower_, vhat_;
    double dt_;
    TimeScheme scheme_;
    std::vector<double> cprime_;
    std::vector<double> inv_denom_;
    std::vector<double> sub_;
};

/// (I - dt A)^{-1} (state + dt source) with Dirichlet 0 at node M.
std::vector<double> step_heat(const RadialGrid& g, const std::vector<double>& state, double dt,
                              const std::vector<double>& source);

struct RunOptions {
    /// Record every k-th step (and the last); 0 picks k so that about 200
    /// steps are recorded.
    std::size_t record_stride = 0;
    /// Laplace transforms of H accumulated over every step, one per alpha.
    std::vector<double> laplace_alphas;
    TimeScheme scheme = TimeScheme::implicit_euler;
};

/// U = T_t 1, W = int_0^t T_s Vhat ds, H = U + W on B_R, recorded at `times`.
/// `deficit` is 1 - H evolved on its own, accurate where H is within
/// rounding of 1.
struct SemigroupRun {
    RadialGrid grid;
    double dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> U;
    std::vector<std::vector<double>> W;
    std::vector<std::vector<double>> H;
    std::vector<std::vector<double>> deficit;
    std::vector<double> heat_loss_at_origin;
    /// (alpha, int_0^{t_end} alpha e^{-alpha t} H_t dt) per requested alpha.
    std::vector<std::pair<double, std::vector<double>>> laplace;
    /// Largest |H - (U + W)| seen over all steps.
    double duhamel_gap = 0.0;
};

SemigroupRun run_H(const RadialGrid& g, double t_end, double dt, const RunOptions& opts = {});
SemigroupRun run_H(const ManifoldSpec& m, double R, std::size_t M, double t_end, double dt,
                   const RunOptions& opts = {});

/// Solves (alpha - A) N = alpha + Vhat with N_M = 0.
std::vector<double> run_N(const RadialGrid& g, double alpha);
std::vector<double> run_N(const ManifoldSpec& m, double alpha, double R, std::size_t M);
/// 1 - N solved for directly.
std::vector<double> resolvent_deficit(const RadialGrid& g, double alpha);

/// Max over non-Dirichlet nodes of
/// |int_0^T alpha e^{-alpha t} H_t dt + e^{-alpha T} H_T - N|, with H linear
/// between time levels. Requires alpha T >= 20.
double laplace_consistency(const SemigroupRun& run, const std::vector<double>& N, double alpha);

struct SweepEntry {
    double R;
    std::size_t cells;
    double H_origin;
    double N_origin;
    /// 1 - H and 1 - N at the origin, computed directly.
    double heat_loss;
    double resolvent_loss;
};

struct SweepOptions {
    /// Cells of the grid for the largest radius; smaller balls reuse its nodes.
    std::size_t cells = 2048;
    double dt = 1e-3;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    /// Largest change of 1 - H_{t_probe} between the last two radii over the
    /// nodes r <= R/4 they share; at least 1e-12.
    double epsilon_R = 1e-12;
    /// The run on the largest ball.
    SemigroupRun last_run;
};

/// H_{t_probe} and N_alpha at the origin on a sequence of nested balls.
/// Throws NumericsError if either fails to be nondecreasing in R (1e-8 slack).
SweepResult exhaustion_sweep(const ManifoldSpec& m, const std::vector<double>& radii, double t_probe, double alpha,
                             const SweepOptions& opts = {});

/// Long format t, r, U, W, H over the recorded times.
void write_run_csv(std::ostream& os, const SemigroupRun& run);
/// R, H_origin, N_origin.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace heatcons
