// heatcons command-line interface.
#include "heatcons/analysis.hpp"
#include "heatcons/config.hpp"
#include "heatcons/csv.hpp"
#include "heatcons/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

using namespace heatcons;
namespace fs = std::filesystem;

namespace {

enum Exit : int {
    exit_usage = 10,
    exit_config = 11,
    exit_numerics = 12,
    exit_io = 13,
    exit_internal = 14,
};

class IoError : public Error {
public:
    using Error::Error;
};

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::conservative_generalized: return 0;
        case Verdict::not_conservative: return 1;
        default: return 2;
    }
}

struct Options {
    std::string config_path;
    std::optional<std::string> report;
    std::optional<std::string> csv_dir;
    std::optional<int> verbosity;
    bool timestamp = true;
    double a = 1.0;
    std::string strategy = "corollary_radial";
};

struct Context {
    RunConfig config;
    ManifoldSpec spec;
    std::optional<fs::path> csv_dir;
    std::optional<std::string> report_path;
    int verbosity = 1;
    bool timestamp = true;

    void log(const std::string& msg) const {
        if (verbosity >= 2) std::cerr << "heatcons: " << msg << "\n";
    }

    template <class Fn>
    void csv(const std::string& name, Fn&& write) const {
        if (!csv_dir) return;
        const fs::path p = *csv_dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoError("cannot write " + p.string());
        write(out);
        out.flush();
        if (!out) throw IoError("failed writing " + p.string());
        log("wrote " + p.string());
    }

    void emit(const Report& r) const {
        const std::string stamp = timestamp ? utc_timestamp() : std::string();
        const std::string text = render(r, stamp);
        if (verbosity >= 1) {
            std::cout << text;
        } else {
            for (const auto& [k, v] : r.values)
                if (k == "final") std::cout << "final: " << v << "\n";
        }
        std::cout.flush();
        if (report_path) {
            std::ofstream out(*report_path, std::ios::binary);
            if (!out) throw IoError("cannot write report " + *report_path);
            out << text;
            if (!out) throw IoError("failed writing report " + *report_path);
        }
    }
};

Context make_context(const Options& o) {
    Context c;
    c.config = load_config(o.config_path);
    c.spec = c.config.manifold();
    c.report_path = o.report ? o.report : c.config.report;
    const auto dir = o.csv_dir ? o.csv_dir : c.config.csv_dir;
    c.verbosity = o.verbosity.value_or(c.config.verbosity);
    c.timestamp = o.timestamp;
    if (dir) {
        std::error_code ec;
        fs::create_directories(*dir, ec);
        if (ec) throw IoError("cannot create csv directory " + *dir + ": " + ec.message());
        c.csv_dir = fs::path(*dir);
    }
    return c;
}

void sweep_csv(std::ostream& os, const std::vector<SweepEntry>& entries) {
    csv::Writer w(os);
    w.header({"R", "H_origin", "N_origin"});
    for (const auto& e : entries) w.row(e.R, e.H_origin, e.N_origin);
}

int cmd_analyze(const Options& o) {
    const Context c = make_context(o);
    AnalysisParams p = c.config.analysis_params();
    p.a = o.a;
    c.log("analyzing " + c.spec.digest());
    const ConservationReport rep = analyze(c.spec, p);
    if (rep.volume_verdict) c.csv("volume_partial_sums.csv", [&](std::ostream& os) { write_partial_sums_csv(os, *rep.volume_verdict); });
    if (rep.timechange_verdict)
        c.csv("timechange_partial_sums.csv", [&](std::ostream& os) { write_partial_sums_csv(os, *rep.timechange_verdict); });
    if (rep.semigroup) c.csv("sweep.csv", [&](std::ostream& os) { sweep_csv(os, rep.semigroup->sweep); });
    c.emit(analysis_report(rep));
    return exit_code(rep.final);
}

int cmd_volume(const Options& o) {
    const Context c = make_context(o);
    const TailVerdict v = generalized_volume_test(c.spec, o.a);
    c.csv("volume_partial_sums.csv", [&](std::ostream& os) { write_partial_sums_csv(os, v); });
    c.emit(volume_report(c.spec.digest(), v, o.a));
    return exit_code(as_verdict(v.classification));
}

int cmd_khasminskii(const Options& o) {
    const Context c = make_context(o);
    std::vector<std::pair<double, KhasminskiiResult>> runs;
    for (double alpha : c.config.alpha) {
        c.log("khasminskii alpha=" + csv::number(alpha));
        runs.emplace_back(alpha, khasminskii_verdict(c.spec, alpha));
        if (c.csv_dir) {
            const RadialSolution sol = solve_radial_eigen(c.spec, alpha, c.config.r_max, c.config.nodes);
            c.csv("eigen_alpha_" + csv::number(alpha) + ".csv", [&](std::ostream& os) { write_solution_csv(os, sol); });
        }
    }
    const Report r = khasminskii_report(c.spec.digest(), runs);
    c.emit(r);
    for (const auto& [k, v] : r.values)
        if (k == "final") {
            if (v == to_string(Verdict::conservative_generalized)) return 0;
            if (v == to_string(Verdict::not_conservative)) return 1;
        }
    return 2;
}

int cmd_semigroup(const Options& o) {
    const Context c = make_context(o);
    const RunConfig& cfg = c.config;
    const double alpha = cfg.alpha.front();
    c.log("exhaustion sweep");
    const SweepResult sweep = exhaustion_sweep(c.spec, cfg.radii, cfg.t_end, alpha, {cfg.nodes, cfg.dt});
    SemigroupPlateau p;
    p.t_probe = cfg.t_end;
    p.H_plateau = sweep.entries.back().H_origin;
    p.heat_loss = sweep.entries.back().heat_loss;
    p.epsilon_R = sweep.epsilon_R;
    p.sweep = sweep.entries;
    p.dichotomy = dichotomy_check(sweep.last_run, sweep.epsilon_R);
    p.verdict = plateau_verdict(sweep.entries, &p.note);

    c.log("heat run on R=" + csv::number(cfg.r_max));
    RunOptions ro;
    ro.laplace_alphas = cfg.alpha;
    const SemigroupRun run = run_H(c.spec, cfg.r_max, cfg.nodes, cfg.t_end, cfg.dt, ro);

    Report r;
    r.title = "heatcons semigroup";
    r.spec_digest = c.spec.digest();
    std::vector<std::string> lines{"verdict: " + std::string(to_string(p.verdict)), "note: " + p.note,
                                   "dichotomy: " + std::string(to_string(p.dichotomy.kind)) + " (" + p.dichotomy.note + ")"};
    for (const auto& e : p.sweep)
        lines.push_back("  R=" + csv::number(e.R) + "  H(0,t)=" + csv::number(e.H_origin) +
                        "  N(0)=" + csv::number(e.N_origin) + "  loss=" + csv::number(e.heat_loss));
    r.sections.emplace_back("exhaustion sweep at t=" + csv::number(cfg.t_end), lines);
    std::vector<std::string> heat{"R=" + csv::number(cfg.r_max) + " cells=" + std::to_string(run.grid.cells()) +
                                  " steps=" + std::to_string(run.steps),
                                  "H(0, t_end) = " + csv::number(run.H.back().front()),
                                  "duhamel gap = " + csv::number(run.duhamel_gap)};
    r.add("final", to_string(p.verdict));
    add_plateau(r, "semigroup", p);
    r.add("run.R", csv::number(cfg.r_max));
    r.add("run.H_origin", csv::number(run.H.back().front()));
    r.add("run.duhamel_gap", csv::number(run.duhamel_gap));
    for (double a : cfg.alpha) {
        if (a * cfg.t_end < 20.0) {
            heat.push_back("laplace alpha=" + csv::number(a) + ": skipped (alpha * t_end < 20)");
            continue;
        }
        const double gap = laplace_consistency(run, run_N(run.grid, a), a);
        heat.push_back("laplace alpha=" + csv::number(a) + ": max |int alpha e^{-alpha t} H_t dt - N_alpha| = " +
                       csv::number(gap));
        r.add("laplace.alpha_" + csv::number(a), csv::number(gap));
    }
    r.sections.emplace_back("heat run", heat);
    c.csv("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, sweep); });
    c.csv("run.csv", [&](std::ostream& os) { write_run_csv(os, run); });
    c.emit(r);
    return exit_code(p.verdict);
}

int cmd_potential(const Options& o) {
    const Context c = make_context(o);
    const PotentialStrategy s =
        o.strategy == "sturm_convex" ? PotentialStrategy::sturm_convex : PotentialStrategy::corollary_radial;
    const PotentialResult res = build_conservative_potential(c.spec, s);
    if (res.retest) c.csv("retest_partial_sums.csv", [&](std::ostream& os) { write_partial_sums_csv(os, *res.retest); });
    if (res.potential && c.csv_dir) {
        RunConfig next = c.config;
        next.potential = res.potential->to_string();
        next.report.reset();
        next.csv_dir.reset();
        c.csv("conservative.conf", [&](std::ostream& os) { os << to_config_text(next); });
    }
    c.emit(potential_report(c.spec.digest(), s, res));
    if (!res.applicable) return 2;
    return exit_code(as_verdict(res.retest->classification));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conservation tests for heat semigroups on weighted model manifolds"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("config", o.config_path, "configuration file")->required();
        sub->add_option("--report", o.report, "also write the report to this path");
        sub->add_option("--csv-dir", o.csv_dir, "directory for CSV side files");
        sub->add_option("-v,--verbosity", o.verbosity, "0 final line only, 1 report, 2 progress on stderr");
        sub->add_flag("!--no-timestamp", o.timestamp, "omit the timestamp line");
    };
    auto* analyze_cmd = app.add_subcommand("analyze", "run all methods and cross-checks");
    auto* volume_cmd = app.add_subcommand("volume-test", "generalized volume test");
    auto* khas_cmd = app.add_subcommand("khasminskii", "bounded solutions of (alpha - L) f = 0");
    auto* semi_cmd = app.add_subcommand("semigroup", "heat semigroup exhaustion sweep");
    auto* pot_cmd = app.add_subcommand("build-potential", "construct a potential making the spec conservative");
    for (auto* s : {analyze_cmd, volume_cmd, khas_cmd, semi_cmd, pot_cmd}) common(s);
    for (auto* s : {analyze_cmd, volume_cmd})
        s->add_option("-a", o.a, "lower limit of the volume-test integral")->check(CLI::PositiveNumber);
    pot_cmd->add_option("--strategy", o.strategy, "corollary_radial or sturm_convex")
        ->check(CLI::IsMember({"corollary_radial", "sturm_convex"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(o);
        if (*volume_cmd) return cmd_volume(o);
        if (*khas_cmd) return cmd_khasminskii(o);
        if (*semi_cmd) return cmd_semigroup(o);
        if (*pot_cmd) return cmd_potential(o);
    } catch (const ValidationError& e) {
        std::cerr << "heatcons: error: " << e.what() << "\n";
        return exit_config;
    } catch (const ParseError& e) {
        std::cerr << "heatcons: error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "heatcons: error: " << e.what() << "\n";
        return exit_io;
    } catch (const Error& e) {
        std::cerr << "heatcons: error: " << e.what() << "\n";
        return exit_numerics;
    } catch (const std::exception& e) {
        std::cerr << "heatcons: internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_internal;
}
