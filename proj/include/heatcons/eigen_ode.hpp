#pragma once

#include "heatcons/manifold.hpp"
#include "heatcons/verdict.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace heatcons {

/// Radial solution of Delta f = w f, f(r_min) = 1, (s f')(r_min) = 0.
struct RadialSolution {
    std::vector<double> grid;
    std::vector<double> values;
    /// s f', +inf where it exceeds the double range.
    std::vector<double> flux;
    /// f'.
    std::vector<double> slope;
    double alpha = 1.0;
    /// First node at which f reached the saturation value 1e300.
    std::optional<double> blowup_radius;
};

/// A radial problem given directly through log s and the source weight w.
struct RadialProblem {
    std::function<double(double)> log_surface;
    /// log w; may be -inf where w vanishes or +inf where it overflows.
    std::function<double(double)> log_source;
};

constexpr double saturation_value = 1e300;
constexpr double default_r_min = 1e-6;

/// Geometric grid with `nodes` points on [r_min, R].
std::vector<double> geometric_grid(double r_min, double R, std::size_t nodes);

/// Integrates on the given grid with an exponentially fitted trapezoidal
/// scheme in (f, f'). Cells where the implicit factor would degrade are
/// split. f and s f' are nondecreasing along the grid by construction.
RadialSolution solve_radial(const RadialProblem& p, const std::vector<double>& grid);

/// Solves (alpha - L_{rho,V}) f = 0, i.e. Delta f = (alpha rho + V) f, on a
/// geometric M-node grid over [1e-6, R]. With `richardson`, the result is
/// extrapolated from this grid and its uniform refinement; a nonmonotone
/// extrapolation raises NumericsError asking for a finer grid.
RadialSolution solve_radial_eigen(const ManifoldSpec& m, double alpha, double R, std::size_t M,
                                  bool richardson = true);

struct BoundednessPolicy {
    double r_max = 512.0;
    /// Cells per doubling [2^k, 2^(k+1)]; [r_min, 1] gets twice as many.
    std::size_t cells_per_doubling = 512;
    int growth_window = 4;
    double growth_factor = 2.0;
    int divergence_window = 6;
    double divergence_ratio = 0.97;
    int stagnation_window = 3;
    double stagnation_ratio = 0.75;
    double stagnation_rel = 1e-3;
};

struct KhasminskiiResult {
    Verdict verdict = Verdict::inconclusive;
    /// (R_k, f(R_k)) for R_k = 2^k up to where the decision was made.
    std::vector<std::pair<double, double>> samples;
    std::optional<double> blowup_radius;
    /// Extrapolated sup f when the verdict is not_conservative.
    std::optional<double> bound;
    std::string note;
};

/// Decides whether the radial solution of (alpha - L_{rho,V}) f = 0 is
/// unbounded (conservative in the generalized sense) or bounded.
KhasminskiiResult khasminskii_verdict(const ManifoldSpec& m, double alpha, const BoundednessPolicy& policy = {});

/// Columns r, f, flux.
void write_solution_csv(std::ostream& os, const RadialSolution& s);

}  // namespace heatcons
