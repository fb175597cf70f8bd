#pragma once

#include "heatcons/radial_expr.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace heatcons {

/// Measure used by a volume integral: rho, rho + V, or V alone.
enum class Weight { rho, rho_plus_V, potential_only };

const char* to_string(Weight w);

/// Rotationally symmetric model manifold with metric dr^2 + sigma(r)^2 dtheta^2,
/// density rho and potential V >= 0, all radial.
struct ManifoldSpec {
    int dimension = 2;
    RadialExpr sigma = RadialExpr::variable();
    RadialExpr rho = RadialExpr::constant(1.0);
    RadialExpr potential = RadialExpr::constant(0.0);
    double r_validate_max = 512.0;

    static ManifoldSpec from_strings(int dimension, std::string_view sigma, std::string_view rho,
                                     std::string_view potential);

    /// log s(r) = log(omega_n) + (n-1) log sigma(r), finite even where s overflows.
    double log_surface(double r) const;
    double weight(Weight w, double r) const;
    double log_weight(Weight w, double r) const;
    /// V / rho at r, saturated to a finite value.
    double potential_ratio(double r) const;
    /// (n-1) sigma'/sigma, the drift coefficient of the radial Laplacian.
    double log_surface_derivative(double r) const;

    /// The same manifold with density rho + V and zero potential.
    ManifoldSpec time_changed() const;
    ManifoldSpec with_potential(RadialExpr v) const;

    /// Canonical one-line printout of the spec.
    std::string digest() const;

    /// The expression rho + V. Hot loops should build it once.
    RadialExpr density_plus_potential() const;
};

/// Surface area of the unit (n-1)-sphere, 2 pi^(n/2) / Gamma(n/2).
double unit_sphere_area(int n);
double log_unit_sphere_area(int n);

/// s(r) = omega_n sigma(r)^(n-1); +inf when it overflows.
double surface_area(const ManifoldSpec& m, double r);

/// omega_n times the integral of w(xi) sigma(xi)^(n-1) over (0, r], by
/// adaptive quadrature started at 1e-12. Saturates at +inf.
double volume(const ManifoldSpec& m, Weight w, double r);
double log_volume(const ManifoldSpec& m, Weight w, double r);

/// Radial intrinsic distance from the pole, the integral of sqrt(rho).
double intrinsic_distance(const ManifoldSpec& m, double r);

struct Violation {
    double r;
    std::string quantity;
    double value;
};

/// Sampled check of sigma > 0, rho > 0, V >= 0 on 10^4 log-spaced radii in
/// (0, r_validate_max], and of sigma(1e-6) < 1e-3.
std::vector<Violation> validate(const ManifoldSpec& m);
std::string describe(const std::vector<Violation>& violations);

/// Cumulative log-volumes and intrinsic distance tabulated on a log-spaced
/// reference grid; lookups beyond the grid integrate from its last node.
class GeometryCache {
public:
    explicit GeometryCache(ManifoldSpec spec, double r_max = 512.0, std::size_t nodes = 4096);

    const ManifoldSpec& spec() const noexcept { return spec_; }
    double omega_n() const noexcept { return omega_; }
    double r_max() const noexcept { return radii_.back(); }

    double log_volume(Weight w, double r) const;
    double volume(Weight w, double r) const;
    /// True if the volume at r exceeds the double range.
    bool volume_overflows(Weight w, double r) const;

    double log_intrinsic_distance(double r) const;
    double intrinsic_distance(double r) const;
    /// Radius at which the intrinsic distance equals d, or nullopt when d
    /// exceeds the (numerically) bounded total distance.
    std::optional<double> inverse_intrinsic_distance(double d) const;

    /// v_{rho+V}(r) / s(r), the integrand of the generalized volume test.
    double volume_surface_ratio(double r) const;

    const std::vector<double>& radii() const noexcept { return radii_; }
    const std::vector<double>& log_volume_table(Weight w) const;

private:
    double log_cumulative(const std::vector<double>& table, double r, int which) const;
    double log_integrand(int which, double x) const;

    ManifoldSpec spec_;
    RadialExpr rho_plus_v_;
    double omega_;
    std::vector<double> radii_;
    std::vector<double> log_v_rho_;
    std::vector<double> log_v_rho_plus_v_;
    std::vector<double> log_v_potential_;
    std::vector<double> log_distance_;
};

}  // namespace heatcons
