#pragma once

#include "heatcons/eigen_ode.hpp"
#include "heatcons/manifold.hpp"
#include "heatcons/semigroup.hpp"
#include "heatcons/tail_classifier.hpp"
#include "heatcons/verdict.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace heatcons {

struct AnalysisParams {
    /// Lower limit of the volume-test integral.
    double a = 1.0;
    TailPolicy tail;
    /// The first alpha drives the Khasminskii verdict and the resolvent in
    /// the sweep; further alphas are checked for agreement.
    std::vector<double> alphas{1.0};
    BoundednessPolicy boundedness;
    std::vector<double> radii{4.0, 5.0, 6.0};
    std::size_t cells = 2048;
    double dt = 1e-3;
    double t_probe = 1.0;
    bool sturm = true;
};

struct DichotomyResult {
    enum class Kind { no_loss, loss_everywhere, mixed };
    Kind kind = Kind::mixed;
    bool pass = false;
    double t_min = 0.0;
    /// (t, r) pairs that break the class suggested by the majority, at most 20.
    std::vector<std::pair<double, double>> offending;
    std::string note;
};

const char* to_string(DichotomyResult::Kind k);

/// Probes nodes r <= R/4 at recorded times t >= t_min (default 10 dt).
/// Passes if the heat loss is <= epsilon_R everywhere, or if it is positive
/// everywhere and exceeds epsilon_R at every probed node at the final time.
DichotomyResult dichotomy_check(const SemigroupRun& run, double epsilon_R, std::optional<double> t_min = {});

struct SemigroupPlateau {
    double t_probe = 0.0;
    /// H_{t_probe} at the origin on the largest ball.
    double H_plateau = 0.0;
    double heat_loss = 0.0;
    double epsilon_R = 0.0;
    std::vector<SweepEntry> sweep;
    DichotomyResult dichotomy;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

/// Reads a sweep: heat loss below 1e-3 and at least halving with the last
/// enlargement means conservative; heat loss of at least 1e-3 that moved by
/// at most 10% means not conservative.
Verdict plateau_verdict(const std::vector<SweepEntry>& sweep, std::string* note = nullptr);

struct ConsistencyFlag {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ConservationReport {
    std::string spec_digest;
    std::optional<TailVerdict> volume_verdict;
    std::optional<KhasminskiiResult> khasminskii;
    /// Extra alphas of the agreement check, with their verdicts.
    std::vector<std::pair<double, Verdict>> khasminskii_alphas;
    std::optional<SemigroupPlateau> semigroup;
    std::optional<TailVerdict> timechange_verdict;
    std::optional<TailVerdict> unperturbed_verdict;
    std::optional<TailVerdict> sturm;
    /// (method, message) for every method that threw.
    std::vector<std::pair<std::string, std::string>> errors;
    std::vector<ConsistencyFlag> consistency;
    std::vector<std::string> disagreements;
    Verdict final = Verdict::inconclusive;
};

Verdict as_verdict(TailClass c);

/// Runs the volume test, the Khasminskii test and the semigroup sweep
/// concurrently, together with the volume test of the time-changed spec,
/// the volume test with V removed and, optionally, the Sturm test. The
/// final verdict requires the three methods to agree.
ConservationReport analyze(const ManifoldSpec& m, const AnalysisParams& params = {});

/// v_{rho+V}(r) / s(r) by direct quadrature.
double volume_test_integrand(const ManifoldSpec& m, double r);

enum class PotentialStrategy { corollary_radial, sturm_convex };

const char* to_string(PotentialStrategy s);

struct PotentialResult {
    /// Empty when the construction does not apply.
    std::optional<RadialExpr> potential;
    /// p in f = exp(x^p).
    int exponent = 0;
    std::optional<TailVerdict> retest;
    /// False for sturm_convex on a spec with bounded intrinsic distance.
    bool applicable = true;
    std::string note;
};

/// Constructs V >= 0 with V = f'(x)^2 for f = exp(x^p), x = r or
/// x = d_rho(0, r), vanishing where x < 1, and retests with the generalized
/// volume test. Escalates p = 4, 5, 6, 7 until the retest diverges; throws
/// NumericsError if it never does.
PotentialResult build_conservative_potential(const ManifoldSpec& m, PotentialStrategy strategy);

/// Piecewise-linear interpolant of (x_i, y_i) as a balanced tree of
/// piecewise nodes, extended linearly beyond both ends.
RadialExpr piecewise_linear(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace heatcons
