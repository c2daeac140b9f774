#pragma once

// Deterministic scalar minimization: uniform grid scan followed by a
// fixed-iteration golden-section refinement of the bracketing cell.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "leggett/errors.hpp"

namespace leggett {

struct ScalarMinimum {
    double x = 0.0;
    double value = 0.0;
};

/// Smallest sample of f on lo + i * (hi - lo) / steps, i = 0..steps. Ties keep the first.
template <typename F>
ScalarMinimum grid_minimize(F&& f, double lo, double hi, std::size_t steps)
{
    if (steps == 0 || !(hi > lo)) throw DomainError("grid minimization needs steps > 0 and hi > lo");
    const double h = (hi - lo) / static_cast<double>(steps);
    ScalarMinimum best{lo, f(lo)};
    for (std::size_t i = 1; i <= steps; ++i) {
        const double x = i == steps ? hi : lo + static_cast<double>(i) * h;
        const double v = f(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

/// Golden-section search on [lo, hi]; assumes f is unimodal there.
template <typename F>
ScalarMinimum golden_section(F&& f, double lo, double hi, int iterations = 200, double tol = 0.0)
{
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations && (b - a) > tol; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (!(c < d)) break;
    }
    const double x = 0.5 * (a + b);
    ScalarMinimum best{x, f(x)};
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
    return best;
}

/// Grid scan over [lo, hi], then golden-section inside the neighbouring cells of the best sample.
template <typename F>
ScalarMinimum grid_then_golden(F&& f, double lo, double hi, std::size_t steps, int iterations = 200)
{
    const ScalarMinimum coarse = grid_minimize(f, lo, hi, steps);
    const double h = (hi - lo) / static_cast<double>(steps);
    const double a = std::max(lo, coarse.x - h);
    const double b = std::min(hi, coarse.x + h);
    const ScalarMinimum fine = golden_section(f, a, b, iterations);
    return fine.value <= coarse.value ? fine : coarse;
}

/// Sharpens a minimum located to within `half_width` of `x` by bisecting on the sign of
/// f(t + h) - f(t - h). Function-value comparisons alone cannot place the minimum of a
/// smooth f closer than about sqrt(machine epsilon); the symmetric difference keeps a
/// slope of order h near the optimum and so resolves it much further. Returns `x`
/// unchanged when the bracket does not straddle a sign change.
template <typename F>
double polish_stationary(F&& f, double x, double half_width, double h = 1e-5, int iterations = 80)
{
    auto slope_sign = [&](double t) { return f(t + h) - f(t - h); };
    double lo = x - half_width;
    double hi = x + half_width;
    if (!(slope_sign(lo) < 0.0 && slope_sign(hi) > 0.0)) return x;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (slope_sign(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace leggett
