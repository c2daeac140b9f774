#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "leggett/errors.hpp"
#include "leggett/geometry.hpp"

namespace leggett {

/// Bell-diagonal two-photon polarization state described by the diagonal
/// (t1, t2, t3) of its correlation matrix: E(a, b) = sum_i t_i a_i b_i, with
/// unbiased local marginals. Axis 1 is the +/- basis, axis 2 is R/L, axis 3 is H/V.
class PolarizationState {
public:
    static constexpr double kPhysicalityTolerance = 1e-12;

    /// Rejects diagonals whose Bell-basis weights go negative.
    static PolarizationState from_correlations(double t1, double t2, double t3)
    {
        for (double t : {t1, t2, t3})
            if (!std::isfinite(t) || t < -1.0 || t > 1.0)
                throw DomainError("correlation-matrix entries must lie in [-1, 1]");
        const PolarizationState s(t1, t2, t3);
        for (double w : s.bell_weights())
            if (w < -kPhysicalityTolerance)
                throw DomainError("correlation diagonal does not describe a physical state");
        return s;
    }

    static PolarizationState singlet() { return PolarizationState(-1.0, -1.0, -1.0); }

    /// Singlet mixed with white noise; V is the two-photon visibility.
    static PolarizationState werner(double visibility)
    {
        check_visibility(visibility);
        return from_correlations(-visibility, -visibility, -visibility);
    }

    /// Singlet with independent visibilities along the +/-, R/L and H/V axes.
    static PolarizationState per_axis(double v1, double v2, double v3)
    {
        check_visibility(v1);
        check_visibility(v2);
        check_visibility(v3);
        return from_correlations(-v1, -v2, -v3);
    }

    double t1() const { return t_[0]; }
    double t2() const { return t_[1]; }
    double t3() const { return t_[2]; }
    const std::array<double, 3>& diagonal() const { return t_; }

    /// Bell-basis weights (density-matrix eigenvalues); the first is the singlet weight.
    std::array<double, 4> bell_weights() const
    {
        const auto [a, b, c] = t_;
        return {(1 - a - b - c) / 4, (1 - a + b + c) / 4, (1 + a - b + c) / 4, (1 + a + b - c) / 4};
    }

private:
    PolarizationState(double t1, double t2, double t3) : t_{t1, t2, t3} {}

    static void check_visibility(double v)
    {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
    }

    std::array<double, 3> t_;
};

inline double correlation(const PolarizationState& state, const Vec3& a, const Vec3& b)
{
    return state.t1() * a.x * b.x + state.t2() * a.y * b.y + state.t3() * a.z * b.z;
}

/// Joint outcome probabilities p(alpha, beta) for alpha, beta in {+1, -1}.
struct OutcomeProbs {
    double pp = 0.25;
    double pm = 0.25;
    double mp = 0.25;
    double mm = 0.25;

    double total() const { return pp + pm + mp + mm; }
    double signed_sum() const { return pp + mm - pm - mp; }
};

inline OutcomeProbs outcome_probs(const PolarizationState& state, const Vec3& a, const Vec3& b)
{
    const double e = correlation(state, a, b);
    const double same = std::max(0.0, (1.0 + e) / 4.0);
    const double diff = std::max(0.0, (1.0 - e) / 4.0);
    return {same, diff, diff, same};
}

} // namespace leggett
