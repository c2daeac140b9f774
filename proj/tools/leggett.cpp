// leggett: command-line front end for the generalized Leggett-type inequality.
//
// Exit codes: 0 success, 2 invalid arguments, 3 malformed input documents.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "leggett/expsim.hpp"
#include "leggett/geometry.hpp"
#include "leggett/hvmodel.hpp"
#include "leggett/inequality.hpp"
#include "leggett/io.hpp"
#include "leggett/quantum.hpp"

namespace {

using leggett::io::json;
using leggett::io::kDegree;

constexpr int kExitArgs = 2;
constexpr int kExitSchema = 3;

struct Options {
    int n = 2;
    double phi_deg = 0.0;
    double visibility = 1.0;
    std::uint64_t counts = leggett::kDefaultCountsPerPair;
    double jitter_deg = 0.5;
    std::uint64_t seed = leggett::kDefaultSeed;
    std::size_t grid = 400;
    int refine = 200;
    std::string criterion = "ratio";
    std::string config;
    std::string out;
    std::string format = "json";
    std::string layout_out;
    std::string counts_csv;
    std::string layout_json;
};

void emit(const Options& opt, const std::string& text)
{
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(opt.out);
    if (!f) throw leggett::DomainError("cannot open output file " + opt.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw leggett::SchemaError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw leggett::SchemaError(path + ": " + e.what());
    }
}

std::string format_report(const Options& opt, const leggett::RunReport& report, const json& extra)
{
    if (opt.format == "table") return leggett::io::format_table(report);
    if (opt.format == "csv") {
        std::ostringstream os;
        leggett::io::write_counts_csv(os, report);
        return os.str();
    }
    json j = leggett::io::to_json(report);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return dump(j);
}

void cmd_predict(const Options& opt)
{
    const double phi = opt.phi_deg * kDegree;
    const double s = leggett::quantum_S(opt.n, phi, opt.visibility);
    const double b = leggett::bound(opt.n, phi);
    emit(opt, dump({{"N", opt.n},
                    {"phi_deg", opt.phi_deg},
                    {"visibility", opt.visibility},
                    {"S_quantum", s},
                    {"bound", b},
                    {"margin", s - b}}));
}

void cmd_bound(const Options& opt)
{
    const double phi = opt.phi_deg * kDegree;
    emit(opt, dump({{"N", opt.n},
                    {"phi_deg", opt.phi_deg},
                    {"k_factor", leggett::k_factor(opt.n)},
                    {"bound", leggett::bound(opt.n, phi)},
                    {"bound_normalized", leggett::bound_normalized(opt.n, phi)}}));
}

void cmd_optimize(const Options& opt)
{
    const leggett::Criterion c = leggett::io::criterion_from_string(opt.criterion);
    const leggett::OptimalAngle closed = leggett::optimal_angle(opt.n, c);
    const leggett::OptimalAngle numeric = leggett::optimal_angle_numeric(opt.n, c);
    emit(opt, dump({{"N", opt.n},
                    {"criterion", opt.criterion},
                    {"phi_star_deg", closed.phi / kDegree},
                    {"phi_star", closed.phi},
                    {"v_crit", closed.v_crit},
                    {"bound_at_star", closed.bound},
                    {"S_at_star", closed.S_quantum},
                    {"numeric_phi_star_deg", numeric.phi / kDegree},
                    {"numeric_abs_diff", std::abs(numeric.phi - closed.phi)}}));
}

leggett::io::RunConfig simulation_config(const Options& opt, const CLI::App& sub)
{
    leggett::io::RunConfig rc;
    if (!opt.config.empty()) rc = leggett::io::run_config_from_json(read_json_file(opt.config));
    if (sub.count("--n")) rc.N = opt.n;
    if (sub.count("--phi-deg")) rc.phi_deg = opt.phi_deg;
    if (sub.count("--criterion")) rc.criterion = leggett::io::criterion_from_string(opt.criterion);
    if (sub.count("--visibility")) rc.state = leggett::PolarizationState::werner(opt.visibility);
    if (sub.count("--counts")) rc.counts_per_pair = opt.counts;
    if (sub.count("--jitter-deg")) rc.jitter_deg = opt.jitter_deg;
    if (sub.count("--seed")) rc.seed = opt.seed;
    return rc;
}

void cmd_simulate(const Options& opt, const CLI::App& sub)
{
    const leggett::io::RunConfig rc = simulation_config(opt, sub);
    const leggett::ExperimentConfig config = rc.experiment();
    const leggett::RunReport report = leggett::run_experiment(config);
    if (!opt.layout_out.empty()) {
        std::ofstream f(opt.layout_out);
        if (!f) throw leggett::DomainError("cannot open " + opt.layout_out);
        f << dump(leggett::io::to_json(config.layout));
    }
    emit(opt, format_report(opt, report,
                            {{"config", leggett::io::to_json(rc)},
                             {"layout", leggett::io::to_json(config.layout)}}));
}

void cmd_adversary(const Options& opt)
{
    const leggett::MeasurementLayout layout = leggett::canonical_layout(opt.n, opt.phi_deg * kDegree);
    leggett::SearchOptions search;
    search.sphere_points = opt.grid;
    search.refine_iterations = opt.refine;
    std::vector<leggett::LandscapeRow> landscape;
    const bool csv = opt.format == "csv";
    const leggett::AdversaryResult r = leggett::relaxed_max_S(layout, search, csv ? &landscape : nullptr);
    if (csv) {
        std::ostringstream os;
        leggett::io::write_landscape_csv(os, landscape);
        emit(opt, os.str());
        return;
    }
    json j = leggett::io::to_json(r);
    j["N"] = opt.n;
    j["phi_deg"] = opt.phi_deg;
    emit(opt, dump(j));
}

void cmd_lemma(const Options& opt)
{
    const leggett::CosineSumMinimum m = leggett::cosine_sum_min(opt.n);
    const double k = leggett::k_factor(opt.n);
    emit(opt, dump({{"N", opt.n},
                    {"cosine_sum_min", m.value},
                    {"argmin", m.argmin},
                    {"k_factor", k},
                    {"abs_diff", std::abs(m.value - k)}}));
}

void cmd_analyze(const Options& opt)
{
    const leggett::MeasurementLayout layout = leggett::io::layout_from_json(read_json_file(opt.layout_json));
    std::ifstream f(opt.counts_csv);
    if (!f) throw leggett::SchemaError("cannot open " + opt.counts_csv);
    const std::vector<leggett::CountRow> rows = leggett::io::read_counts_csv(f);
    const leggett::RunReport report = leggett::analyze_counts(rows, layout);
    emit(opt, format_report(opt, report, {{"layout", leggett::io::to_json(layout)}}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generalized Leggett-type inequality: predictions, bounds, simulation and analysis"};
    app.require_subcommand(1);
    Options opt;

    auto add_n = [&](CLI::App* s) { s->add_option("--n", opt.n, "Inequality order N (>= 2)")->capture_default_str(); };
    auto add_phi = [&](CLI::App* s, bool required) {
        auto* o = s->add_option("--phi-deg", opt.phi_deg, "Relative setting angle phi in degrees");
        if (required) o->required();
    };
    auto add_output = [&](CLI::App* s, std::vector<std::string> formats) {
        s->add_option("--out", opt.out, "Write output to this file instead of stdout");
        s->add_option("--format", opt.format, "Output format")
            ->check(CLI::IsMember(std::move(formats)))
            ->capture_default_str();
    };

    auto* predict = app.add_subcommand("predict", "Quantum S value, bound and margin");
    add_n(predict);
    add_phi(predict, true);
    predict->add_option("--visibility", opt.visibility, "Two-photon visibility")->capture_default_str();
    add_output(predict, {"json"});

    auto* bound = app.add_subcommand("bound", "Nonlocal-realistic bound at (N, phi)");
    add_n(bound);
    add_phi(bound, true);
    add_output(bound, {"json"});

    auto* optimize = app.add_subcommand("optimize", "Optimal angle and critical visibility");
    add_n(optimize);
    optimize->add_option("--criterion", opt.criterion, "ratio (critical visibility) or difference")
        ->check(CLI::IsMember({"ratio", "difference"}))
        ->capture_default_str();
    add_output(optimize, {"json"});

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the coincidence experiment");
    add_n(simulate);
    add_phi(simulate, false);
    simulate->add_option("--visibility", opt.visibility, "Werner visibility (overrides config state)");
    simulate->add_option("--counts", opt.counts, "Mean coincidences per setting pair");
    simulate->add_option("--jitter-deg", opt.jitter_deg, "Analyzer angle error half-width in degrees");
    simulate->add_option("--seed", opt.seed, "Random seed");
    simulate->add_option("--criterion", opt.criterion, "Angle criterion when phi is not given")
        ->check(CLI::IsMember({"ratio", "difference"}));
    simulate->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    simulate->add_option("--layout-out", opt.layout_out, "Also write the layout JSON here");
    add_output(simulate, {"json", "table", "csv"});

    auto* adversary = app.add_subcommand("adversary", "Adversarial search over hidden-variable subensembles");
    add_n(adversary);
    add_phi(adversary, true);
    adversary->add_option("--grid", opt.grid, "Lattice points per sphere")->capture_default_str();
    adversary->add_option("--refine", opt.refine, "Refinement iterations")->capture_default_str();
    add_output(adversary, {"json", "csv"});

    auto* lemma = app.add_subcommand("lemma", "Numerical check of the cosine-sum lemma");
    add_n(lemma);
    add_output(lemma, {"json"});

    auto* analyze = app.add_subcommand("analyze", "Analyze coincidence counts against a layout");
    analyze->add_option("counts", opt.counts_csv, "Count CSV (pair_id,n_pp,n_pm,n_mp,n_mm)")->required();
    analyze->add_option("layout", opt.layout_json, "Layout JSON")->required();
    add_output(analyze, {"json", "table", "csv"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitArgs;
    }

    try {
        if (*predict) cmd_predict(opt);
        else if (*bound) cmd_bound(opt);
        else if (*optimize) cmd_optimize(opt);
        else if (*simulate) cmd_simulate(opt, *simulate);
        else if (*adversary) cmd_adversary(opt);
        else if (*lemma) cmd_lemma(opt);
        else if (*analyze) cmd_analyze(opt);
    } catch (const leggett::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const leggett::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const leggett::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArgs;
    }
    return 0;
}
