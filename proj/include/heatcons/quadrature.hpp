#pragma once

#include "heatcons/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace heatcons::quadrature {

struct Tolerance {
    double rel = 1e-9;
    double abs = 1e-12;
    int max_depth = 60;
    int max_intervals = 20000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

namespace detail {

// 15-point Kronrod nodes with the embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

template <class F>
std::pair<double, double> gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kronrod_w[7] * fc;
    double gauss = gauss_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kronrod_x[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_w[i] * sum;
        if (i % 2 == 1) gauss += gauss_w[i / 2] * sum;
    }
    return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Adaptive G7-K15 integration of f over [a, b] by interval bisection.
/// Subintervals are accepted once their Kronrod/Gauss difference falls under
/// a share of max(abs, rel * |running total|) proportional to their width.
/// Throws QuadratureError naming the offending subinterval if the depth or
/// interval budget is exhausted.
template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
    Result out;
    if (a == b) return out;
    if (!(a < b)) throw QuadratureError("integration bounds out of order", a, b);

    struct Segment {
        double a, b;
        int depth;
    };
    const double width = b - a;
    auto first = detail::gk15(f, a, b);
    if (!std::isfinite(first.first)) {
        out.value = first.first;
        return out;
    }
    double total_guess = std::fabs(first.first);

    std::vector<Segment> stack;
    stack.push_back({a, b, 0});
    while (!stack.empty()) {
        const Segment s = stack.back();
        stack.pop_back();
        auto [v, e] = (s.depth == 0) ? first : detail::gk15(f, s.a, s.b);
        if (!std::isfinite(v)) {
            out.value = v;
            out.error = std::numeric_limits<double>::infinity();
            return out;
        }
        const double share = (s.b - s.a) / width;
        const double allowed = std::max(tol.abs, tol.rel * total_guess) * share;
        if (e <= allowed || e <= 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(v)) {
            out.value += v;
            out.error += e;
            ++out.intervals;
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        if (s.depth >= tol.max_depth || mid <= s.a || mid >= s.b ||
            static_cast<int>(stack.size()) + out.intervals >= tol.max_intervals)
            throw QuadratureError("adaptive quadrature did not converge", s.a, s.b);
        // Refine the running magnitude so relative tolerances track the
        // integral rather than the first coarse estimate.
        total_guess = std::max(total_guess, std::fabs(v));
        stack.push_back({mid, s.b, s.depth + 1});
        stack.push_back({s.a, mid, s.depth + 1});
    }
    return out;
}

/// log of the integral of exp(log_f) over [a, b], for integrands whose
/// magnitude spans far more than the double range (e.g. r*exp(r^3) at
/// r = 100). The interval is bisected until log_f varies by at most
/// `max_log_step` on each piece; pieces below exp(-80) of the running
/// maximum are dropped, the rest are integrated after rescaling and summed
/// with log-sum-exp. Returns -inf for an identically vanishing integrand.
template <class LogF>
double log_integrate(LogF&& log_f, double a, double b, const Tolerance& tol = {}, double max_log_step = 4.0) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (a == b) return neg_inf;
    if (!(a < b)) throw QuadratureError("integration bounds out of order", a, b);

    struct Piece {
        double a, b, la, lb;
        int depth;
    };
    struct Accepted {
        double a, b, ref;
        bool unresolved;
    };
    std::vector<Piece> stack{{a, b, log_f(a), log_f(b), 0}};
    std::vector<Accepted> accepted;
    // A coarse scan seeds the running maximum so that negligible pieces are
    // pruned before they are refined.
    double running_max = std::max(stack.front().la, stack.front().lb);
    for (int i = 1; i < 32; ++i) running_max = std::max(running_max, log_f(a + (b - a) * i / 32.0));
    if (std::isnan(running_max)) throw QuadratureError("log-integrand is not a number", a, b);
    if (running_max == std::numeric_limits<double>::infinity()) return running_max;
    constexpr int max_split_depth = 60;

    while (!stack.empty()) {
        const Piece p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double lm = log_f(mid);
        const double hi = std::max({p.la, lm, p.lb});
        if (hi == neg_inf) continue;
        if (std::isnan(hi)) throw QuadratureError("log-integrand is not a number", p.a, p.b);
        if (hi == std::numeric_limits<double>::infinity()) return hi;
        running_max = std::max(running_max, hi);
        if (hi < running_max - 80.0) continue;
        const double lo = std::min({p.la, lm, p.lb});
        const bool can_split = p.depth < max_split_depth && mid > p.a && mid < p.b;
        if (hi - lo > max_log_step && can_split) {
            // Larger half first, so the maximum is found early.
            const Piece left{p.a, mid, p.la, lm, p.depth + 1};
            const Piece right{mid, p.b, lm, p.lb, p.depth + 1};
            if (p.la > p.lb) {
                stack.push_back(right);
                stack.push_back(left);
            } else {
                stack.push_back(left);
                stack.push_back(right);
            }
            continue;
        }
        // Pieces at rounding width sit on a discontinuity; quadrature nodes
        // would round outside them, so they are bounded by width times maximum.
        accepted.push_back({p.a, p.b, hi, !can_split});
    }

    double acc_ref = neg_inf;
    double acc_sum = 0.0;
    for (const Accepted& piece : accepted) {
        if (piece.ref < running_max - 80.0) continue;
        const double ref = piece.ref;
        if (piece.unresolved) {
            const double lv = std::log(piece.b - piece.a) + ref;
            if (acc_ref == neg_inf) {
                acc_ref = lv;
                acc_sum = 1.0;
            } else if (lv > acc_ref) {
                acc_sum = acc_sum * std::exp(acc_ref - lv) + 1.0;
                acc_ref = lv;
            } else {
                acc_sum += std::exp(lv - acc_ref);
            }
            continue;
        }
        // The rescaled integrand peaks near 1 on the piece.
        // log_f carries absolute noise of order eps * |log_f|, which bounds
        // the attainable relative accuracy of the rescaled integrand.
        Tolerance piece_tol = tol;
        piece_tol.rel = std::max(tol.rel, 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(ref));
        piece_tol.abs = 1e-3 * piece_tol.rel * (piece.b - piece.a);
        auto scaled = [&](double x) {
            const double l = log_f(x);
            return l == neg_inf ? 0.0 : std::exp(l - ref);
        };
        const double v = integrate(scaled, piece.a, piece.b, piece_tol).value;
        if (!(v > 0.0)) continue;
        const double lv = std::log(v) + ref;
        if (acc_ref == neg_inf) {
            acc_ref = lv;
            acc_sum = 1.0;
        } else if (lv > acc_ref) {
            acc_sum = acc_sum * std::exp(acc_ref - lv) + 1.0;
            acc_ref = lv;
        } else {
            acc_sum += std::exp(lv - acc_ref);
        }
    }
    if (acc_ref == neg_inf) return neg_inf;
    return acc_ref + std::log(acc_sum);
}

}  // namespace heatcons::quadrature
