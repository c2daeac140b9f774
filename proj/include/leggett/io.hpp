#pragma once

// JSON and CSV surfaces: layouts, states, reports, run configuration files,
// count files and adversarial landscapes.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "leggett/errors.hpp"
#include "leggett/expsim.hpp"
#include "leggett/geometry.hpp"
#include "leggett/hvmodel.hpp"
#include "leggett/inequality.hpp"
#include "leggett/quantum.hpp"

namespace leggett::io {

using nlohmann::json;

inline constexpr double kDegree = std::numbers::pi / 180.0;

namespace detail {

inline void require_keys(const json& j, std::string_view what, const std::set<std::string>& required,
                         const std::set<std::string>& optional = {})
{
    if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!required.contains(key) && !optional.contains(key))
            throw SchemaError("unknown key '" + key + "' in " + std::string(what));
    for (const auto& key : required)
        if (!j.contains(key)) throw SchemaError("missing key '" + key + "' in " + std::string(what));
}

inline double number(const json& j, std::string_view what)
{
    if (!j.is_number()) throw SchemaError(std::string(what) + " must be a number");
    return j.get<double>();
}

inline std::int64_t integer(const json& j, std::string_view what)
{
    if (!j.is_number_integer()) throw SchemaError(std::string(what) + " must be an integer");
    return j.get<std::int64_t>();
}

inline std::string fmt6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// vectors, planes, layouts

inline json to_json(const UnitVec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline UnitVec3 unit_vec_from_json(const json& j, std::string_view what)
{
    if (!j.is_array() || j.size() != 3) throw SchemaError(std::string(what) + " must be [x, y, z]");
    try {
        return UnitVec3::from_components(detail::number(j[0], what), detail::number(j[1], what),
                                         detail::number(j[2], what));
    } catch (const DomainError& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

inline json to_json(const PlaneFrame& f) { return {{"e1", to_json(f.e1())}, {"e2", to_json(f.e2())}}; }

inline PlaneFrame plane_from_json(const json& j, std::string_view what)
{
    detail::require_keys(j, what, {"e1", "e2"});
    try {
        return PlaneFrame(unit_vec_from_json(j["e1"], "e1"), unit_vec_from_json(j["e2"], "e2"));
    } catch (const DomainError& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

/// Groups are emitted in the order phi_1, zero_1, phi_2, zero_2.
inline json to_json(const MeasurementLayout& layout)
{
    json groups = json::array();
    for (Group g : kAllGroups) {
        json pairs = json::array();
        for (const SettingPair& p : layout.group(g))
            pairs.push_back({{"a", to_json(p.a)}, {"b", to_json(p.b)}, {"xi", p.xi}, {"phi", p.phi}});
        groups.push_back(std::move(pairs));
    }
    return {{"N", layout.N},
            {"phi", layout.phi},
            {"plane1", to_json(layout.plane1)},
            {"plane2", to_json(layout.plane2)},
            {"groups", std::move(groups)}};
}

inline MeasurementLayout layout_from_json(const json& j)
{
    detail::require_keys(j, "layout", {"N", "phi", "plane1", "plane2", "groups"});
    MeasurementLayout layout;
    layout.N = static_cast<int>(detail::integer(j["N"], "layout N"));
    layout.phi = detail::number(j["phi"], "layout phi");
    layout.plane1 = plane_from_json(j["plane1"], "plane1");
    layout.plane2 = plane_from_json(j["plane2"], "plane2");
    const json& groups = j["groups"];
    if (!groups.is_array() || groups.size() != 4)
        throw SchemaError("layout groups must be a list of 4 groups");
    for (Group g : kAllGroups) {
        const json& pairs = groups[static_cast<std::size_t>(g)];
        const std::string name(group_name(g));
        if (!pairs.is_array()) throw SchemaError("group " + name + " must be a list");
        for (const json& p : pairs) {
            detail::require_keys(p, "setting pair of " + name, {"a", "b", "xi", "phi"});
            layout.group(g).push_back(SettingPair{unit_vec_from_json(p["a"], "a"),
                                                  unit_vec_from_json(p["b"], "b"),
                                                  detail::number(p["phi"], "phi"),
                                                  detail::number(p["xi"], "xi"), layout.plane_of(g)});
        }
    }
    try {
        layout.validate();
    } catch (const DomainError& e) {
        throw SchemaError(std::string("invalid layout: ") + e.what());
    }
    return layout;
}

// ---------------------------------------------------------------------------
// states

inline json to_json(const PolarizationState& s) { return {{"t", {s.t1(), s.t2(), s.t3()}}}; }

/// Accepts {"t": [t1, t2, t3]}, {"visibility": V} or {"per_axis": [V1, V2, V3]}.
inline PolarizationState state_from_json(const json& j)
{
    detail::require_keys(j, "state", {}, {"t", "visibility", "per_axis"});
    if (j.size() != 1) throw SchemaError("state needs exactly one of t, visibility, per_axis");
    try {
        if (j.contains("visibility")) return PolarizationState::werner(detail::number(j["visibility"], "visibility"));
        const bool diag = j.contains("t");
        const json& arr = diag ? j["t"] : j["per_axis"];
        if (!arr.is_array() || arr.size() != 3)
            throw SchemaError(std::string(diag ? "t" : "per_axis") + " must hold 3 numbers");
        const double x = detail::number(arr[0], "state"), y = detail::number(arr[1], "state"),
                     z = detail::number(arr[2], "state");
        return diag ? PolarizationState::from_correlations(x, y, z) : PolarizationState::per_axis(x, y, z);
    } catch (const DomainError& e) {
        throw SchemaError(std::string("invalid state: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const EvaluationReport& r)
{
    json terms = json::array();
    for (const EvaluationTerm& t : r.terms)
        terms.push_back({{"group", std::string(group_name(t.group))},
                         {"slot", t.slot},
                         {"pair_id", t.pair_id},
                         {"label", t.label},
                         {"value", t.value}});
    return {{"N", r.N},
            {"phi", r.phi},
            {"phi_deg", r.phi / kDegree},
            {"S", r.S},
            {"S_normalized", r.S_normalized},
            {"bound", r.bound},
            {"margin", r.margin},
            {"modulus_sums", {r.modulus_sums[0], r.modulus_sums[1]}},
            {"sigma_S", r.sigma_S ? json(*r.sigma_S) : json(nullptr)},
            {"significance", r.significance ? json(*r.significance) : json(nullptr)},
            {"terms", std::move(terms)}};
}

inline json to_json(const CountRecord& c)
{
    return {{"n_pp", c.n_pp}, {"n_pm", c.n_pm}, {"n_mp", c.n_mp}, {"n_mm", c.n_mm}};
}

inline json to_json(const RunReport& r)
{
    json pairs = json::array();
    for (const PairResult& p : r.pairs)
        pairs.push_back({{"pair_id", p.pair_id},
                         {"label", p.label},
                         {"a", to_json(p.a)},
                         {"b", to_json(p.b)},
                         {"multiplicity", p.multiplicity},
                         {"counts", to_json(p.counts)},
                         {"E", p.estimate.value},
                         {"sigma_E", p.estimate.sigma}});
    return {{"pairs", std::move(pairs)}, {"evaluation", to_json(r.evaluation)}};
}

inline json to_json(const AdversaryResult& r)
{
    return {{"relaxed_max_S", r.relaxed_max_S},
            {"bound", r.bound},
            {"gap", r.gap},
            {"subensembles", r.subensembles},
            {"argmax", {{"u", to_json(r.argmax.u)}, {"v", to_json(r.argmax.v)}}}};
}

/// Text table with the columns of a pair-by-pair comparison of ideal singlet
/// predictions and measured values, followed by the S summary line.
inline std::string format_table(const RunReport& r)
{
    using detail::fmt6;
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %12s %14s %12s %10s\n", "pair", "E_theory", "E_experiment",
                  "sigma_E", "counts");
    os << line;
    std::vector<double> ideal;
    for (const PairResult& p : r.pairs) {
        const double th = correlation(PolarizationState::singlet(), p.a, p.b);
        ideal.push_back(th);
        const std::string shared = p.multiplicity > 1 ? "  (x" + std::to_string(p.multiplicity) + ")" : "";
        std::snprintf(line, sizeof line, "%-8s %12s %14s %12s %10llu%s\n", p.label.c_str(),
                      fmt6(th).c_str(), fmt6(p.estimate.value).c_str(), fmt6(p.estimate.sigma).c_str(),
                      static_cast<unsigned long long>(p.counts.total()), shared.c_str());
        os << line;
    }
    const EvaluationReport& e = r.evaluation;
    // Ideal singlet S, regrouped by the same slot terms.
    std::array<double, 2> th_sums{};
    for (const EvaluationTerm& t : e.terms) th_sums[modulus_of(t.group)] += ideal[t.pair_id];
    const double s_theory = std::abs(th_sums[0]) + std::abs(th_sums[1]);
    std::snprintf(line, sizeof line, "%-8s %12s %14s %12s\n", "", "S_theory", "S_experiment", "sigma_S");
    os << line;
    std::snprintf(line, sizeof line, "%-8s %12s %14s %12s\n", "", fmt6(s_theory).c_str(), fmt6(e.S).c_str(),
                  e.sigma_S ? fmt6(*e.sigma_S).c_str() : "-");
    os << line;
    os << "bound " << fmt6(e.bound) << "  margin " << fmt6(e.margin) << "  significance "
       << (e.significance ? fmt6(*e.significance) + " sigma" : std::string("-")) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// count files

inline constexpr std::string_view kCountsHeader = "pair_id,n_pp,n_pm,n_mp,n_mm";

inline void write_counts_csv(std::ostream& os, const RunReport& r)
{
    os << kCountsHeader << '\n';
    for (const PairResult& p : r.pairs)
        os << p.pair_id << ',' << p.counts.n_pp << ',' << p.counts.n_pm << ',' << p.counts.n_mp << ','
           << p.counts.n_mm << '\n';
}

inline std::vector<CountRow> read_counts_csv(std::istream& is)
{
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    };
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("count file is empty");
    strip(line);
    if (line != kCountsHeader)
        throw SchemaError("count file header must be '" + std::string(kCountsHeader) + "'");

    std::vector<CountRow> rows;
    for (int lineno = 2; std::getline(is, line); ++lineno) {
        strip(line);
        if (line.empty()) continue;
        std::uint64_t fields[5];
        std::string_view rest(line);
        for (int k = 0; k < 5; ++k) {
            const auto comma = rest.find(',');
            const std::string_view tok = rest.substr(0, comma);
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), fields[k]);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
                throw SchemaError("count file line " + std::to_string(lineno) +
                                  ": expected 5 non-negative integers");
            if (k < 4) {
                if (comma == std::string_view::npos)
                    throw SchemaError("count file line " + std::to_string(lineno) + ": too few fields");
                rest.remove_prefix(comma + 1);
            } else if (comma != std::string_view::npos) {
                throw SchemaError("count file line " + std::to_string(lineno) + ": too many fields");
            }
        }
        rows.push_back(CountRow{static_cast<std::size_t>(fields[0]),
                                CountRecord{fields[1], fields[2], fields[3], fields[4]}});
    }
    return rows;
}

inline void write_landscape_csv(std::ostream& os, const std::vector<LandscapeRow>& rows)
{
    os << "u_theta,u_phi,v_theta,v_phi,relaxed_S\n";
    char line[160];
    for (const LandscapeRow& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.u_theta, r.u_phi, r.v_theta,
                      r.v_phi, r.relaxed_S);
        os << line;
    }
}

// ---------------------------------------------------------------------------
// run configuration files

/// Simulation parameters from a JSON document. Every key is optional; unknown
/// keys are rejected. Without phi_deg the optimal angle for `criterion` is used.
struct RunConfig {
    int N = 2;
    std::optional<double> phi_deg;
    Criterion criterion = Criterion::ratio;
    PolarizationState state = PolarizationState::singlet();
    std::uint64_t counts_per_pair = kDefaultCountsPerPair;
    double jitter_deg = 0.5;
    std::uint64_t seed = kDefaultSeed;

    double phi() const { return phi_deg ? *phi_deg * kDegree : optimal_angle(N, criterion).phi; }

    ExperimentConfig experiment() const
    {
        ExperimentConfig c;
        c.state = state;
        c.layout = canonical_layout(N, phi());
        c.counts_per_pair = counts_per_pair;
        c.jitter_deg = jitter_deg;
        c.seed = seed;
        return c;
    }
};

inline Criterion criterion_from_string(std::string_view s)
{
    if (s == "ratio") return Criterion::ratio;
    if (s == "difference") return Criterion::difference;
    throw SchemaError("criterion must be 'ratio' or 'difference'");
}

inline std::string_view to_string(Criterion c) { return c == Criterion::ratio ? "ratio" : "difference"; }

inline RunConfig run_config_from_json(const json& j)
{
    detail::require_keys(j, "run config", {},
                         {"N", "phi_deg", "criterion", "state", "counts_per_pair", "jitter_deg", "seed"});
    RunConfig c;
    if (j.contains("N")) c.N = static_cast<int>(detail::integer(j["N"], "N"));
    if (j.contains("phi_deg")) c.phi_deg = detail::number(j["phi_deg"], "phi_deg");
    if (j.contains("criterion")) {
        if (!j["criterion"].is_string()) throw SchemaError("criterion must be a string");
        c.criterion = criterion_from_string(j["criterion"].get<std::string>());
    }
    if (j.contains("state")) c.state = state_from_json(j["state"]);
    if (j.contains("counts_per_pair")) {
        const auto n = detail::integer(j["counts_per_pair"], "counts_per_pair");
        if (n < 1) throw SchemaError("counts_per_pair must be at least 1");
        c.counts_per_pair = static_cast<std::uint64_t>(n);
    }
    if (j.contains("jitter_deg")) c.jitter_deg = detail::number(j["jitter_deg"], "jitter_deg");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
            throw SchemaError("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (c.N < 2) throw SchemaError("N must be at least 2");
    if (c.phi_deg && !(*c.phi_deg >= 0.0 && *c.phi_deg <= 180.0))
        throw SchemaError("phi_deg must lie in [0, 180]");
    if (!(c.jitter_deg >= 0.0 && c.jitter_deg <= kMaxJitterDeg))
        throw SchemaError("jitter_deg must lie in [0, 5]");
    return c;
}

inline json to_json(const RunConfig& c)
{
    json j = {{"N", c.N},
              {"criterion", std::string(to_string(c.criterion))},
              {"state", to_json(c.state)},
              {"counts_per_pair", c.counts_per_pair},
              {"jitter_deg", c.jitter_deg},
              {"seed", c.seed}};
    if (c.phi_deg) j["phi_deg"] = *c.phi_deg;
    return j;
}

} // namespace leggett::io
