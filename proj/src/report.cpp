#include "heatcons/report.hpp"

#include "heatcons/csv.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

namespace heatcons {

namespace {

std::string num(double v) { return csv::number(v); }

std::string yes_no(bool b) { return b ? "pass" : "fail"; }

std::string pairs(const std::vector<std::pair<double, double>>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += " ";
        out += "(" + num(xs[i].first) + "," + num(xs[i].second) + ")";
    }
    return out;
}

}  // namespace

void render(std::ostream& os, const Report& r, const std::string& timestamp) {
    os << "# " << r.title << "\n";
    if (!timestamp.empty()) os << "# generated " << timestamp << "\n";
    if (!r.spec_digest.empty()) os << "spec: " << r.spec_digest << "\n";
    for (const auto& [heading, lines] : r.sections) {
        os << "\n== " << heading << " ==\n";
        for (const auto& l : lines) os << l << "\n";
    }
    os << "\n== values ==\n";
    for (const auto& [k, v] : r.values) os << k << ": " << v << "\n";
}

std::string render(const Report& r, const std::string& timestamp) {
    std::ostringstream os;
    render(os, r, timestamp);
    return os.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void add_tail(Report& r, const std::string& prefix, const TailVerdict& v) {
    r.add(prefix + ".classification", to_string(v.classification));
    r.add(prefix + ".horizons", std::to_string(v.partial_sums.size()));
    if (!v.partial_sums.empty()) {
        r.add(prefix + ".last_R", num(v.partial_sums.back().R));
        r.add(prefix + ".last_log_partial", num(v.partial_sums.back().log_value));
    }
    r.add(prefix + ".growth_exponent", num(v.growth_exponent));
    if (v.limit) r.add(prefix + ".limit", num(*v.limit));
    r.add(prefix + ".saturated", v.saturated ? "true" : "false");
}

void add_khasminskii(Report& r, const std::string& prefix, const KhasminskiiResult& k) {
    r.add(prefix + ".verdict", to_string(k.verdict));
    if (!k.samples.empty()) {
        r.add(prefix + ".last_R", num(k.samples.back().first));
        r.add(prefix + ".last_f", num(k.samples.back().second));
    }
    if (k.blowup_radius) r.add(prefix + ".blowup_radius", num(*k.blowup_radius));
    if (k.bound) r.add(prefix + ".bound", num(*k.bound));
}

void add_plateau(Report& r, const std::string& prefix, const SemigroupPlateau& p) {
    r.add(prefix + ".verdict", to_string(p.verdict));
    r.add(prefix + ".t_probe", num(p.t_probe));
    r.add(prefix + ".H_plateau", num(p.H_plateau));
    r.add(prefix + ".heat_loss", num(p.heat_loss));
    r.add(prefix + ".epsilon_R", num(p.epsilon_R));
    r.add(prefix + ".dichotomy", std::string(to_string(p.dichotomy.kind)) + " " + yes_no(p.dichotomy.pass));
}

namespace {

std::vector<std::string> tail_lines(const TailVerdict& v) {
    std::vector<std::string> out{"classification: " + std::string(to_string(v.classification)),
                                 "note: " + v.confidence_note};
    for (const auto& ps : v.partial_sums) out.push_back("  R=" + num(ps.R) + "  log I=" + num(ps.log_value));
    return out;
}

std::vector<std::string> khas_lines(const KhasminskiiResult& k) {
    std::vector<std::string> out{"verdict: " + std::string(to_string(k.verdict)), "note: " + k.note};
    for (const auto& [R, f] : k.samples) out.push_back("  f(" + num(R) + ") = " + num(f));
    return out;
}

std::vector<std::string> plateau_lines(const SemigroupPlateau& p) {
    std::vector<std::string> out{"verdict: " + std::string(to_string(p.verdict)), "note: " + p.note,
                                 "dichotomy: " + std::string(to_string(p.dichotomy.kind)) + ", " +
                                     yes_no(p.dichotomy.pass) + " (" + p.dichotomy.note + ")"};
    if (!p.dichotomy.offending.empty()) out.push_back("offending (t,r): " + pairs(p.dichotomy.offending));
    for (const auto& e : p.sweep)
        out.push_back("  R=" + num(e.R) + "  H(0,t)=" + num(e.H_origin) + "  N(0)=" + num(e.N_origin) +
                      "  loss=" + num(e.heat_loss));
    return out;
}

}  // namespace

Report analysis_report(const ConservationReport& rep) {
    Report r;
    r.title = "heatcons analysis";
    r.spec_digest = rep.spec_digest;
    if (rep.volume_verdict) r.sections.emplace_back("generalized volume test", tail_lines(*rep.volume_verdict));
    if (rep.timechange_verdict)
        r.sections.emplace_back("volume test of the time-changed spec", tail_lines(*rep.timechange_verdict));
    if (rep.khasminskii) r.sections.emplace_back("khasminskii", khas_lines(*rep.khasminskii));
    if (rep.semigroup) r.sections.emplace_back("semigroup exhaustion", plateau_lines(*rep.semigroup));
    if (rep.sturm) r.sections.emplace_back("sturm test", std::vector<std::string>{sturm_interpretation(*rep.sturm)});
    std::vector<std::string> checks;
    for (const auto& f : rep.consistency) checks.push_back(f.name + ": " + yes_no(f.pass) + " (" + f.detail + ")");
    r.sections.emplace_back("consistency", checks);
    if (!rep.errors.empty()) {
        std::vector<std::string> errs;
        for (const auto& [m, e] : rep.errors) errs.push_back(m + ": " + e);
        r.sections.emplace_back("errors", errs);
    }
    if (!rep.disagreements.empty()) r.sections.emplace_back("disagreements", rep.disagreements);

    r.add("final", to_string(rep.final));
    if (rep.volume_verdict) add_tail(r, "volume", *rep.volume_verdict);
    if (rep.timechange_verdict) add_tail(r, "timechange", *rep.timechange_verdict);
    if (rep.khasminskii) add_khasminskii(r, "khasminskii", *rep.khasminskii);
    for (const auto& [a, v] : rep.khasminskii_alphas) r.add("khasminskii.alpha_" + num(a), to_string(v));
    if (rep.semigroup) add_plateau(r, "semigroup", *rep.semigroup);
    if (rep.sturm) r.add("sturm.classification", to_string(rep.sturm->classification));
    for (const auto& f : rep.consistency) r.add("flag." + f.name, yes_no(f.pass));
    r.add("errors", std::to_string(rep.errors.size()));
    return r;
}

Report volume_report(const std::string& spec_digest, const TailVerdict& v, double a) {
    Report r;
    r.title = "heatcons volume-test";
    r.spec_digest = spec_digest;
    r.sections.emplace_back("generalized volume test from a=" + num(a), tail_lines(v));
    r.add("final", to_string(as_verdict(v.classification)));
    add_tail(r, "volume", v);
    return r;
}

Report khasminskii_report(const std::string& spec_digest,
                          const std::vector<std::pair<double, KhasminskiiResult>>& runs) {
    Report r;
    r.title = "heatcons khasminskii";
    r.spec_digest = spec_digest;
    std::optional<Verdict> common;
    bool agree = true;
    for (const auto& [alpha, k] : runs) {
        r.sections.emplace_back("alpha=" + num(alpha), khas_lines(k));
        if (common && *common != k.verdict) agree = false;
        if (!common) common = k.verdict;
    }
    const Verdict final = agree && common ? *common : Verdict::inconclusive;
    r.add("final", to_string(final));
    r.add("alpha_agreement", agree ? "pass" : "fail");
    for (const auto& [alpha, k] : runs) add_khasminskii(r, "khasminskii.alpha_" + num(alpha), k);
    return r;
}

Report potential_report(const std::string& spec_digest, PotentialStrategy strategy, const PotentialResult& p) {
    Report r;
    r.title = "heatcons build-potential";
    r.spec_digest = spec_digest;
    std::vector<std::string> lines{"strategy: " + std::string(to_string(strategy)), "note: " + p.note};
    if (p.potential) lines.push_back("potential: " + p.potential->to_string());
    r.sections.emplace_back("construction", lines);
    if (p.retest) r.sections.emplace_back("retest", tail_lines(*p.retest));
    Verdict final = Verdict::inconclusive;
    if (p.applicable && p.retest) final = as_verdict(p.retest->classification);
    r.add("final", to_string(final));
    r.add("strategy", to_string(strategy));
    r.add("applicable", p.applicable ? "true" : "false");
    if (p.applicable) r.add("exponent", std::to_string(p.exponent));
    if (p.potential) r.add("potential", p.potential->to_string());
    if (p.retest) add_tail(r, "retest", *p.retest);
    return r;
}

}  // namespace heatcons
