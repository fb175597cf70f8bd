#pragma once

#include "heatcons/manifold.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace heatcons {

enum class TailClass { divergent, convergent, inconclusive };

const char* to_string(TailClass c);

/// Horizons are R_k = a * 2^k, k = 1..horizons. Evaluation stops as soon as
/// a verdict is reached, or before the horizon where `max_horizon` is
/// exceeded.
struct TailPolicy {
    int horizons = 20;
    double rel_tol = 1e-6;
    /// Divergent once this many consecutive increment ratios are >= divergence_ratio.
    int divergence_window = 6;
    double divergence_ratio = 0.97;
    /// Convergent once this many consecutive ratios are <= convergence_ratio
    /// and the geometric tail extrapolation is stable to rel_tol.
    int convergence_window = 3;
    double convergence_ratio = 0.9;
    double max_horizon = 1e300;
    double quadrature_rel = 1e-10;
};

struct PartialSum {
    double R;
    /// Saturates at the largest finite double.
    double value;
    double log_value;
};

struct TailVerdict {
    TailClass classification = TailClass::inconclusive;
    std::vector<PartialSum> partial_sums;
    /// Least-squares slope of log I_k against log R_k over the last four
    /// increments I_k; about p + 1 for F ~ r^p.
    double growth_exponent = 0.0;
    std::string confidence_note;
    /// Extrapolated value of the integral when convergent.
    std::optional<double> limit;
    bool saturated = false;
};

/// Classifies the integral of F over [a, inf). Throws DomainError if F is
/// negative where it is evaluated.
TailVerdict classify_tail(const std::function<double(double)>& F, double a, const TailPolicy& policy = {});

/// Same, for an integrand given through log F (-inf where F vanishes), so
/// that F may exceed the double range.
TailVerdict classify_tail_log(const std::function<double(double)>& log_F, double a, const TailPolicy& policy = {});

/// Tail of v_{rho+V}(r) / s(r); divergence means conservative in the
/// generalized sense.
TailVerdict generalized_volume_test(const ManifoldSpec& m, double a = 1.0, const TailPolicy& policy = {});

/// Tail of R / max(log nu_rho(R), 1) over [1, inf), where nu_rho(R) is the
/// rho-volume of the intrinsic ball of radius R. Divergence is sufficient for
/// conservativeness with V = 0; otherwise the test says nothing.
TailVerdict sturm_test(const ManifoldSpec& m, const TailPolicy& policy = {});

/// "conservative (sufficient condition)" or "test silent".
std::string sturm_interpretation(const TailVerdict& v);

/// Largest radius at which log s(r) still carries a relative precision of
/// about 1e-7 after rounding.
double precision_horizon(const ManifoldSpec& m);

/// Columns R, partial_integral.
void write_partial_sums_csv(std::ostream& os, const TailVerdict& v);

}  // namespace heatcons
