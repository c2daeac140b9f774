#pragma once

// The order-N Leggett-type inequality
//
//   (1/N) |sum_n E(phi-pairs, plane 1) + sum_n E(zero-pairs, plane 1)|
// + (1/N) |sum_n E(phi-pairs, plane 2) + sum_n E(zero-pairs, plane 2)|
//   <= 4 - 2 (K(N)/N) |sin(phi/2)|,      K(N) = cot(pi / 2N),
//
// evaluated here in its unnormalized form (both sides times N), which for
// N = 2 is S <= 8 - 2 |sin(phi/2)|.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leggett/errors.hpp"
#include "leggett/geometry.hpp"
#include "leggett/minimize.hpp"
#include "leggett/quantum.hpp"

namespace leggett {

namespace detail {

inline void check_order(int N)
{
    if (N < 2) throw DomainError("inequality order N must be at least 2, got " + std::to_string(N));
}

inline void check_angle(double phi)
{
    if (!(phi >= 0.0 && phi <= std::numbers::pi))
        throw DomainError("phi must lie in [0, pi] radians");
}

} // namespace detail

/// cot(pi / 2N).
inline double k_factor(int N)
{
    detail::check_order(N);
    return 1.0 / std::tan(std::numbers::pi / (2.0 * N));
}

/// Right-hand side of the per-N normalized inequality.
inline double bound_normalized(int N, double phi)
{
    detail::check_angle(phi);
    return 4.0 - 2.0 * (k_factor(N) / N) * std::abs(std::sin(phi / 2.0));
}

/// Unnormalized right-hand side, N times the normalized one; 8 - 2|sin(phi/2)| for N = 2.
inline double bound(int N, double phi) { return N * bound_normalized(N, phi); }

/// Left-hand side for a Werner state of visibility V: 2 N V (1 + cos phi).
inline double quantum_S(int N, double phi, double visibility)
{
    detail::check_order(N);
    detail::check_angle(phi);
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw DomainError("visibility must lie in [0, 1]");
    return 2.0 * N * visibility * (1.0 + std::cos(phi));
}

/// Visibility at which the quantum value equals the bound at angle phi.
inline double critical_visibility(int N, double phi)
{
    return bound(N, phi) / quantum_S(N, phi, 1.0);
}

/// Largest phi with quantum violation for a perfect singlet: sin(phi/2) < K(N) / 2N.
inline double violation_window_edge(int N) { return 2.0 * std::asin(k_factor(N) / (2.0 * N)); }

struct EvaluationTerm {
    Group group = Group::phi_1;
    std::size_t slot = 0;    ///< index within its group
    std::size_t pair_id = 0; ///< index into distinct_pairs(layout)
    std::string label;
    double value = 0.0;
};

struct EvaluationReport {
    int N = 2;
    double phi = 0.0;
    double S = 0.0;
    double S_normalized = 0.0;
    double bound = 0.0;
    double margin = 0.0; ///< S - bound; positive means violation
    std::array<double, 2> modulus_sums{};
    std::optional<double> sigma_S;
    std::optional<double> significance; ///< margin / sigma_S
    std::vector<EvaluationTerm> terms;
};

/// dS/dE for each distinct pair: the signed count of the slots it fills, with the
/// sign of the enclosing modulus (a zero modulus counts as positive).
inline std::vector<double> slot_derivatives(const std::vector<DistinctPair>& pairs,
                                            const std::array<double, 2>& modulus_sums)
{
    std::vector<double> d(pairs.size(), 0.0);
    for (std::size_t j = 0; j < pairs.size(); ++j)
        for (const SlotRef& s : pairs[j].slots)
            d[j] += modulus_sums[modulus_of(s.group)] < 0.0 ? -1.0 : 1.0;
    return d;
}

/// Evaluates the inequality from one value per distinct setting pair (the order of
/// distinct_pairs(layout)). Optional sigmas are propagated to first order, treating
/// each distinct pair as one independent datum, so a pair shared by both moduli
/// enters with derivative magnitude 2.
inline EvaluationReport evaluate_measured(const MeasurementLayout& layout, std::span<const double> values,
                                          std::span<const double> sigmas = {})
{
    constexpr double kValueSlack = 1e-12;
    const std::vector<DistinctPair> pairs = distinct_pairs(layout);
    if (values.size() != pairs.size())
        throw InputError("expected " + std::to_string(pairs.size()) + " correlation values, got " +
                         std::to_string(values.size()));
    if (!sigmas.empty() && sigmas.size() != pairs.size())
        throw InputError("expected " + std::to_string(pairs.size()) + " sigma values, got " +
                         std::to_string(sigmas.size()));

    EvaluationReport report;
    report.N = layout.N;
    report.phi = layout.phi;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        const double e = values[j];
        if (!std::isfinite(e) || std::abs(e) > 1.0 + kValueSlack)
            throw InputError("correlation for " + pairs[j].label() + " lies outside [-1, 1]");
        for (const SlotRef& s : pairs[j].slots) {
            report.modulus_sums[modulus_of(s.group)] += e;
            report.terms.push_back(EvaluationTerm{s.group, s.index, j, pairs[j].label(), e});
        }
    }
    std::sort(report.terms.begin(), report.terms.end(), [](const auto& l, const auto& r) {
        return l.group != r.group ? l.group < r.group : l.slot < r.slot;
    });

    report.S = std::abs(report.modulus_sums[0]) + std::abs(report.modulus_sums[1]);
    report.S_normalized = report.S / layout.N;
    report.bound = bound(layout.N, layout.phi);
    report.margin = report.S - report.bound;

    if (!sigmas.empty()) {
        const std::vector<double> deriv = slot_derivatives(pairs, report.modulus_sums);
        double var = 0.0;
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (!(sigmas[j] >= 0.0) || !std::isfinite(sigmas[j]))
                throw InputError("sigma for " + pairs[j].label() + " must be finite and non-negative");
            var += (deriv[j] * sigmas[j]) * (deriv[j] * sigmas[j]);
        }
        report.sigma_S = std::sqrt(var);
        if (*report.sigma_S > 0.0) report.significance = report.margin / *report.sigma_S;
    }
    return report;
}

/// Evaluates with a correlation source `provider(a, b) -> double`, queried once per
/// distinct setting pair.
template <typename Provider>
EvaluationReport evaluate(Provider&& provider, const MeasurementLayout& layout,
                          std::span<const double> sigmas = {})
{
    const std::vector<DistinctPair> pairs = distinct_pairs(layout);
    std::vector<double> values;
    values.reserve(pairs.size());
    for (const DistinctPair& p : pairs) values.push_back(static_cast<double>(provider(p.pair.a, p.pair.b)));
    return evaluate_measured(layout, values, sigmas);
}

inline auto correlation_provider(const PolarizationState& state)
{
    return [state](const UnitVec3& a, const UnitVec3& b) { return correlation(state, a, b); };
}

/// ratio: minimize bound / quantum value (critical visibility).
/// difference: maximize quantum value - bound for a perfect singlet.
enum class Criterion { ratio, difference };

struct OptimalAngle {
    Criterion criterion = Criterion::ratio;
    double phi = 0.0;
    double v_crit = 1.0;       ///< critical visibility at phi
    double bound = 0.0;        ///< bound(N, phi)
    double S_quantum = 0.0;    ///< quantum_S(N, phi, 1)
};

namespace detail {

inline OptimalAngle make_optimum(int N, double phi, Criterion criterion)
{
    return {criterion, phi, critical_visibility(N, phi), bound(N, phi), quantum_S(N, phi, 1.0)};
}

} // namespace detail

/// Closed form. With c = K(N)/N and s = sin(phi/2) the critical visibility is
/// (2 - c s) / (2 (1 - s^2)), minimized at s = (2 - sqrt(4 - c^2)) / c; the
/// difference N (2 c s - 4 s^2) peaks at s = c / 4.
inline OptimalAngle optimal_angle(int N, Criterion criterion = Criterion::ratio)
{
    const double c = k_factor(N) / N;
    const double s = criterion == Criterion::ratio ? (2.0 - std::sqrt(4.0 - c * c)) / c : c / 4.0;
    return detail::make_optimum(N, 2.0 * std::asin(s), criterion);
}

/// Same optimum found numerically: grid over [0, pi), golden-section refinement of the
/// best cell, then a symmetric-difference polish of the stationary point.
inline OptimalAngle optimal_angle_numeric(int N, Criterion criterion = Criterion::ratio,
                                          std::size_t grid_steps = 20000)
{
    detail::check_order(N);
    const double hi = std::numbers::pi * (1.0 - 1e-9);
    auto objective = [N, criterion](double phi) {
        phi = std::clamp(phi, 0.0, std::numbers::pi);
        return criterion == Criterion::ratio ? critical_visibility(N, phi)
                                             : bound(N, phi) - quantum_S(N, phi, 1.0);
    };
    const ScalarMinimum m = grid_then_golden(objective, 0.0, hi, grid_steps);
    const double phi = polish_stationary(objective, m.x, 1e-6);
    return detail::make_optimum(N, phi, criterion);
}

} // namespace leggett
