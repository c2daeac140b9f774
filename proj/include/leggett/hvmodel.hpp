#pragma once

// Nonlocal realistic (Leggett-type) model class and its numerical stress test.
//
// Photons of a subensemble carry definite polarizations u (Alice) and v (Bob) and
// obey Malus' law locally: <A> = u.a, <B> = v.b. Nonnegativity of the four joint
// probabilities with those marginals confines the subensemble correlation to
//
//     -1 + |u.a + v.b|  <=  <AB>  <=  1 - |u.a - v.b|.
//
// relaxed_max_S lets every slot of the inequality pick its extremal value
// independently inside this interval (per modulus, all upper ends or all lower
// ends), which can only enlarge S. Observable correlations are mixtures over
// subensembles, and each modulus is convex in the mixture, so no model of the
// class can exceed the supremum over single subensembles. A result at or below
// bound() is therefore a conservative confirmation that the class respects it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "leggett/errors.hpp"
#include "leggett/geometry.hpp"
#include "leggett/inequality.hpp"
#include "leggett/minimize.hpp"

namespace leggett {

struct Subensemble {
    UnitVec3 u;
    UnitVec3 v;
};

struct CorrelationInterval {
    double lo = -1.0;
    double hi = 1.0;

    bool contains(double e, double tol = 0.0) const { return e >= lo - tol && e <= hi + tol; }
};

/// Mean outcome of a photon with polarization u measured along a.
inline double malus_marginal(const UnitVec3& u, const UnitVec3& a) { return dot(u, a); }

inline CorrelationInterval correlation_interval(const Subensemble& s, const UnitVec3& a,
                                                const UnitVec3& b)
{
    const double p = malus_marginal(s.u, a);
    const double q = malus_marginal(s.v, b);
    return {-1.0 + std::abs(p + q), 1.0 - std::abs(p - q)};
}

/// Relaxed left-hand side for one subensemble, computed slot by slot.
inline double relaxed_S(const MeasurementLayout& layout, const Subensemble& s)
{
    std::array<double, 2> upper{};
    std::array<double, 2> lower{};
    for (Group g : kAllGroups)
        for (const SettingPair& p : layout.group(g)) {
            const CorrelationInterval iv = correlation_interval(s, p.a, p.b);
            upper[modulus_of(g)] += iv.hi;
            lower[modulus_of(g)] += iv.lo;
        }
    return std::max(upper[0], -lower[0]) + std::max(upper[1], -lower[1]);
}

/// Deterministic, nearly uniform spherical Fibonacci lattice of n points.
inline std::vector<UnitVec3> fibonacci_sphere(std::size_t n)
{
    if (n == 0) throw DomainError("sphere lattice needs at least one point");
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<UnitVec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = golden_angle * static_cast<double>(i);
        pts.push_back(UnitVec3::normalized({r * std::cos(az), r * std::sin(az), z}));
    }
    return pts;
}

struct SearchOptions {
    std::size_t sphere_points = 400; ///< lattice size per sphere; the grid is its square
    int refine_iterations = 200;
    int refine_seeds = 8;   ///< best grid cells handed to local refinement
    int decay_every = 25;   ///< step halves every this many iterations
    double decay = 0.5;
    bool seed_setting_axes = true; ///< also try u, v among +/- the setting vectors
};

struct AdversaryResult {
    double relaxed_max_S = 0.0;
    Subensemble argmax;
    double bound = 0.0;
    double gap = 0.0; ///< bound - relaxed_max_S
    std::size_t subensembles = 0; ///< number of (u, v) evaluated on the grid
};

/// One grid sample of the landscape, angles in radians.
struct LandscapeRow {
    double u_theta;
    double u_phi;
    double v_theta;
    double v_phi;
    double relaxed_S;
};

namespace detail {

/// Slot table of a layout reduced to indices into its distinct vectors.
struct SlotTable {
    std::vector<UnitVec3> alice;
    std::vector<UnitVec3> bob;
    std::array<std::vector<std::pair<std::size_t, std::size_t>>, 2> slots;

    explicit SlotTable(const MeasurementLayout& layout)
    {
        auto index = [](std::vector<UnitVec3>& vs, const UnitVec3& w) {
            for (std::size_t i = 0; i < vs.size(); ++i)
                if (approx_equal(vs[i], w, 1e-14)) return i;
            vs.push_back(w);
            return vs.size() - 1;
        };
        for (Group g : kAllGroups)
            for (const SettingPair& p : layout.group(g))
                slots[modulus_of(g)].emplace_back(index(alice, p.a), index(bob, p.b));
    }

    double evaluate(const std::vector<double>& pa, const double* pb) const
    {
        double total = 0.0;
        for (const auto& mod : slots) {
            double upper = 0.0;
            double neg_lower = 0.0;
            for (const auto& [i, j] : mod) {
                upper += 1.0 - std::abs(pa[i] - pb[j]);
                neg_lower += 1.0 - std::abs(pa[i] + pb[j]);
            }
            total += std::max(upper, neg_lower);
        }
        return total;
    }
};

struct Candidate {
    double value;
    Subensemble s;
};

/// Keeps the k largest candidates; earlier entries win ties.
class TopK {
public:
    explicit TopK(std::size_t k) : k_(std::max<std::size_t>(k, 1)) {}

    void offer(double value, const UnitVec3& u, const UnitVec3& v)
    {
        if (items_.size() == k_ && !(value > items_.back().value)) return;
        auto pos = std::upper_bound(items_.begin(), items_.end(), value,
                                    [](double val, const Candidate& c) { return val > c.value; });
        items_.insert(pos, Candidate{value, {u, v}});
        if (items_.size() > k_) items_.pop_back();
    }

    const std::vector<Candidate>& items() const { return items_; }

private:
    std::size_t k_;
    std::vector<Candidate> items_;
};

/// Coordinate ascent on the four spherical angles of (u, v).
inline Candidate refine(const MeasurementLayout& layout, Candidate start, double step,
                        const SearchOptions& opt)
{
    std::array<double, 4> x{start.s.u.theta(), start.s.u.azimuth(), start.s.v.theta(),
                            start.s.v.azimuth()};
    auto eval = [&](const std::array<double, 4>& y) {
        const Subensemble s{UnitVec3::from_spherical(y[0], y[1]), UnitVec3::from_spherical(y[2], y[3])};
        return std::pair{relaxed_S(layout, s), s};
    };
    auto [best, best_s] = eval(x);
    if (start.value > best) {
        best = start.value;
        best_s = start.s;
    }
    for (int it = 0; it < opt.refine_iterations; ++it) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (double dir : {1.0, -1.0}) {
                auto y = x;
                y[k] += dir * step;
                const auto [val, s] = eval(y);
                if (val > best) {
                    best = val;
                    best_s = s;
                    x = y;
                    break;
                }
            }
        }
        if (opt.decay_every > 0 && (it + 1) % opt.decay_every == 0) step *= opt.decay;
    }
    return {best, best_s};
}

} // namespace detail

/// Adversarial search for the largest relaxed S over single subensembles: a full
/// lattice x lattice grid on S^2 x S^2 (plus setting-aligned candidates), followed by
/// coordinate ascent from the best cells. The returned maximum is a lower estimate of
/// the true supremum. When `landscape` is given every grid sample is appended to it.
inline AdversaryResult relaxed_max_S(const MeasurementLayout& layout, const SearchOptions& opt = {},
                                     std::vector<LandscapeRow>* landscape = nullptr)
{
    if (opt.sphere_points < 2 || opt.refine_iterations < 0 || opt.refine_seeds < 1 ||
        !(opt.decay > 0.0 && opt.decay <= 1.0))
        throw DomainError("degenerate adversarial search parameters");
    layout.validate();

    const detail::SlotTable table(layout);
    const std::vector<UnitVec3> lattice = fibonacci_sphere(opt.sphere_points);

    std::vector<UnitVec3> u_points = lattice;
    std::vector<UnitVec3> v_points = lattice;
    if (opt.seed_setting_axes) {
        for (const auto* vs : {&table.alice, &table.bob})
            for (const UnitVec3& w : *vs) {
                for (auto* pts : {&u_points, &v_points}) {
                    pts->push_back(w);
                    pts->push_back(-w);
                }
            }
    }

    // Bob projections for every v, row-major.
    const std::size_t nb = table.bob.size();
    std::vector<double> pb(v_points.size() * nb);
    for (std::size_t iv = 0; iv < v_points.size(); ++iv)
        for (std::size_t j = 0; j < nb; ++j) pb[iv * nb + j] = dot(v_points[iv], table.bob[j]);

    detail::TopK top(static_cast<std::size_t>(opt.refine_seeds));
    std::vector<double> pa(table.alice.size());
    std::size_t evaluated = 0;
    const bool record = landscape != nullptr;
    if (record) landscape->reserve(landscape->size() + u_points.size() * v_points.size());
    for (const UnitVec3& u : u_points) {
        for (std::size_t i = 0; i < pa.size(); ++i) pa[i] = dot(u, table.alice[i]);
        for (std::size_t iv = 0; iv < v_points.size(); ++iv) {
            const double val = table.evaluate(pa, &pb[iv * nb]);
            top.offer(val, u, v_points[iv]);
            if (record)
                landscape->push_back({u.theta(), u.azimuth(), v_points[iv].theta(),
                                      v_points[iv].azimuth(), val});
        }
        evaluated += v_points.size();
    }

    const double step0 = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(opt.sphere_points));
    detail::Candidate best = top.items().front();
    for (const detail::Candidate& c : top.items()) {
        const detail::Candidate r = detail::refine(layout, c, step0, opt);
        if (r.value > best.value) best = r;
    }

    AdversaryResult out;
    out.relaxed_max_S = best.value;
    out.argmax = best.s;
    out.bound = bound(layout.N, layout.phi);
    out.gap = out.bound - out.relaxed_max_S;
    out.subensembles = evaluated;
    return out;
}

/// sum_{n<N} |cos(n pi / N - x)|.
inline double cosine_sum(int N, double x)
{
    double s = 0.0;
    for (int n = 0; n < N; ++n) s += std::abs(std::cos(n * std::numbers::pi / N - x));
    return s;
}

struct CosineSumMinimum {
    double value = 0.0;
    double argmin = 0.0;
};

/// Minimum over x of cosine_sum(N, x), found by a grid of spacing <= `step` and
/// golden-section refinement. Shifting x by pi/N only permutes the terms, so one
/// period [0, pi/N] covers all of [0, pi).
inline CosineSumMinimum cosine_sum_min(int N, double step = 1e-6)
{
    if (N < 2) throw DomainError("cosine-sum lemma needs N >= 2");
    if (!(step > 0.0)) throw DomainError("grid step must be positive");
    const double period = std::numbers::pi / N;
    const auto steps = static_cast<std::size_t>(std::ceil(period / step));
    auto f = [N](double x) { return cosine_sum(N, x); };
    const ScalarMinimum m = grid_then_golden(f, 0.0, period, steps);
    return {m.value, m.x};
}

} // namespace leggett
