#pragma once

// Monte Carlo model of the coincidence-counting experiment and the analysis that
// turns counts into correlation estimates, S, sigma_S and a significance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "leggett/errors.hpp"
#include "leggett/geometry.hpp"
#include "leggett/inequality.hpp"
#include "leggett/quantum.hpp"

namespace leggett {

inline constexpr std::uint64_t kDefaultSeed = 20071118;
inline constexpr std::uint64_t kDefaultCountsPerPair = 200000;
inline constexpr double kMaxJitterDeg = 5.0;

struct ExperimentConfig {
    PolarizationState state = PolarizationState::singlet();
    MeasurementLayout layout = canonical_layout(2, optimal_angle(2).phi);
    std::uint64_t counts_per_pair = kDefaultCountsPerPair; ///< mean coincidences per setting pair
    double jitter_deg = 0.5; ///< half-width of the uniform analyzer-angle error
    std::uint64_t seed = kDefaultSeed;

    void validate() const
    {
        if (counts_per_pair < 1) throw DomainError("counts_per_pair must be at least 1");
        if (!(jitter_deg >= 0.0 && jitter_deg <= kMaxJitterDeg))
            throw DomainError("jitter_deg must lie in [0, 5]");
        layout.validate();
    }
};

struct CountRecord {
    std::uint64_t n_pp = 0;
    std::uint64_t n_pm = 0;
    std::uint64_t n_mp = 0;
    std::uint64_t n_mm = 0;

    std::uint64_t total() const { return n_pp + n_pm + n_mp + n_mm; }
    bool operator==(const CountRecord&) const = default;
};

struct EstimatedCorrelation {
    double value = 0.0;
    double sigma = 0.0;
};

/// E = (n++ + n-- - n+- - n-+) / total with the Poisson-propagated
/// sigma = sqrt((1 - E^2) / total).
inline EstimatedCorrelation estimate(const CountRecord& r)
{
    const std::uint64_t total = r.total();
    if (total == 0) throw InputError("cannot estimate a correlation from zero coincidences");
    const double n = static_cast<double>(total);
    const double same = static_cast<double>(r.n_pp) + static_cast<double>(r.n_mm);
    const double diff = static_cast<double>(r.n_pm) + static_cast<double>(r.n_mp);
    const double e = (same - diff) / n;
    return {e, std::sqrt(std::max(0.0, 1.0 - e * e) / n)};
}

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent random stream for one setting pair of one run.
inline std::mt19937_64 pair_stream(std::uint64_t seed, std::uint64_t pair_index)
{
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(pair_index + 0x632be59bd9b4e019ULL)));
}

namespace detail {

template <typename Rng>
std::uint64_t poisson(double mean, Rng& rng)
{
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<long long> dist(mean);
    return static_cast<std::uint64_t>(dist(rng));
}

} // namespace detail

/// Draws one analyzer error per side, uniform in +/- jitter_deg of physical angle,
/// turns it into a 2x rotation inside the pair's plane on the Poincare sphere, and
/// then draws the four coincidence channels as independent Poisson variables with
/// means counts_per_pair * p(alpha, beta).
template <typename Rng>
CountRecord simulate_pair(const PolarizationState& state, const SettingPair& pair,
                          std::uint64_t counts_per_pair, double jitter_deg, Rng& rng)
{
    if (counts_per_pair < 1) throw DomainError("counts_per_pair must be at least 1");
    if (!(jitter_deg >= 0.0 && jitter_deg <= kMaxJitterDeg))
        throw DomainError("jitter_deg must lie in [0, 5]");

    UnitVec3 a = pair.a;
    UnitVec3 b = pair.b;
    if (jitter_deg > 0.0) {
        std::uniform_real_distribution<double> err(-jitter_deg, jitter_deg);
        const double to_sphere = 2.0 * std::numbers::pi / 180.0;
        const double da = err(rng) * to_sphere;
        const double db = err(rng) * to_sphere;
        a = rotate_in_plane(pair.plane, pair.plane.angle_of(a) + da);
        b = rotate_in_plane(pair.plane, pair.plane.angle_of(b) + db);
    }

    const OutcomeProbs p = outcome_probs(state, a, b);
    const double n = static_cast<double>(counts_per_pair);
    CountRecord r;
    r.n_pp = detail::poisson(n * p.pp, rng);
    r.n_pm = detail::poisson(n * p.pm, rng);
    r.n_mp = detail::poisson(n * p.mp, rng);
    r.n_mm = detail::poisson(n * p.mm, rng);
    return r;
}

struct PairResult {
    std::size_t pair_id = 0;
    std::string label;
    UnitVec3 a;
    UnitVec3 b;
    std::size_t multiplicity = 1; ///< inequality slots filled by this measurement
    CountRecord counts;
    EstimatedCorrelation estimate;
};

struct RunReport {
    std::vector<PairResult> pairs;
    EvaluationReport evaluation;
};

/// Count record tagged with the distinct-pair index it belongs to.
struct CountRow {
    std::size_t pair_id = 0;
    CountRecord counts;
};

namespace detail {

inline RunReport analyze_ordered(const std::vector<DistinctPair>& pairs,
                                 const std::vector<CountRecord>& records,
                                 const MeasurementLayout& layout)
{
    RunReport report;
    std::vector<double> values;
    std::vector<double> sigmas;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        PairResult pr;
        pr.pair_id = j;
        pr.label = pairs[j].label();
        pr.a = pairs[j].pair.a;
        pr.b = pairs[j].pair.b;
        pr.multiplicity = pairs[j].slots.size();
        pr.counts = records[j];
        try {
            pr.estimate = estimate(records[j]);
        } catch (const InputError& e) {
            throw InputError("pair " + std::to_string(j) + " (" + pr.label + "): " + e.what());
        }
        values.push_back(pr.estimate.value);
        sigmas.push_back(pr.estimate.sigma);
        report.pairs.push_back(std::move(pr));
    }
    report.evaluation = evaluate_measured(layout, values, sigmas);
    return report;
}

} // namespace detail

/// Simulates each distinct setting pair once (a pair shared by both moduli is
/// measured once and reused) and analyzes the result. Deterministic in the seed.
inline RunReport run_experiment(const ExperimentConfig& config)
{
    config.validate();
    const std::vector<DistinctPair> pairs = distinct_pairs(config.layout);
    std::vector<CountRecord> records;
    records.reserve(pairs.size());
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        auto rng = pair_stream(config.seed, j);
        records.push_back(
            simulate_pair(config.state, pairs[j].pair, config.counts_per_pair, config.jitter_deg, rng));
    }
    return detail::analyze_ordered(pairs, records, config.layout);
}

/// Same analysis for externally supplied counts; exactly one row per distinct pair.
inline RunReport analyze_counts(std::span<const CountRow> rows, const MeasurementLayout& layout)
{
    layout.validate();
    const std::vector<DistinctPair> pairs = distinct_pairs(layout);
    std::vector<CountRecord> records(pairs.size());
    std::vector<bool> seen(pairs.size(), false);
    for (const CountRow& row : rows) {
        if (row.pair_id >= pairs.size())
            throw SchemaError("unknown pair_id " + std::to_string(row.pair_id) + "; layout has " +
                              std::to_string(pairs.size()) + " distinct pairs");
        if (seen[row.pair_id])
            throw SchemaError("duplicate counts for pair_id " + std::to_string(row.pair_id) + " (" +
                              pairs[row.pair_id].label() + ")");
        seen[row.pair_id] = true;
        records[row.pair_id] = row.counts;
    }
    for (std::size_t j = 0; j < pairs.size(); ++j)
        if (!seen[j])
            throw SchemaError("missing counts for pair_id " + std::to_string(j) + " (" +
                              pairs[j].label() + ")");
    return detail::analyze_ordered(pairs, records, layout);
}

} // namespace leggett
