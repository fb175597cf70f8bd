#include "heatcons/config.hpp"

#include "heatcons/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace heatcons {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::string, std::less<>>& key_sections() {
    static const std::map<std::string, std::string, std::less<>> keys{
        {"dimension", "manifold"}, {"sigma", "manifold"},   {"rho", "manifold"},     {"potential", "manifold"},
        {"r_max", "numerics"},     {"radii", "numerics"},   {"nodes", "numerics"},   {"dt", "numerics"},
        {"t_end", "numerics"},     {"alpha", "numerics"},   {"report", "outputs"},   {"csv_dir", "outputs"},
        {"verbosity", "outputs"},
    };
    return keys;
}

struct Value {
    std::string text;
    bool quoted = false;
    std::size_t line = 0;
};

// Splits off a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_quotes = !in_quotes;
        else if (line[i] == '#' && !in_quotes) return line.substr(0, i);
    }
    return line;
}

double to_double(const Value& v, std::string_view key) {
    const std::string_view s = trim(v.text);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (v.quoted || s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(std::string(key) + ": expected a number, got '" + v.text + "'", v.line);
    return out;
}

long long to_integer(const Value& v, std::string_view key) {
    const std::string_view s = trim(v.text);
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (v.quoted || s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + v.text + "'", v.line);
    return out;
}

std::vector<double> to_list(const Value& v, std::string_view key) {
    std::vector<double> out;
    std::string_view rest = v.text;
    while (true) {
        const auto comma = rest.find(',');
        Value item{std::string(trim(rest.substr(0, comma))), v.quoted, v.line};
        out.push_back(to_double(item, key));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::string to_expression(const Value& v, std::string_view key) {
    if (!v.quoted) throw ConfigError(std::string(key) + ": expressions must be in double quotes", v.line);
    try {
        (void)RadialExpr::parse(v.text);
    } catch (const ParseError& e) {
        throw ConfigError(std::string(key) + ": " + e.what() + " at offset " + std::to_string(e.offset()), v.line);
    }
    return v.text;
}

std::string list_text(const std::vector<double>& xs) {
    std::vector<std::string> parts;
    for (double x : xs) parts.push_back(csv::number(x));
    return join(parts, ", ");
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ConfigError::ConfigError(const std::string& message, std::size_t line)
    : ValidationError(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      problems_{line ? "line " + std::to_string(line) + ": " + message : message} {}

ConfigError::ConfigError(std::vector<std::string> problems)
    : ValidationError("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

ManifoldSpec RunConfig::manifold() const { return ManifoldSpec::from_strings(dimension, sigma, rho, potential); }

AnalysisParams RunConfig::analysis_params() const {
    AnalysisParams p;
    p.alphas = alpha;
    p.radii = radii;
    p.cells = nodes;
    p.dt = dt;
    p.t_probe = t_end;
    return p;
}

std::vector<std::string> RunConfig::problems() const {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) out.push_back(std::string(name) + " must be positive (got " + csv::number(v) + ")");
    };
    if (dimension < 1) out.push_back("dimension must be >= 1 (got " + std::to_string(dimension) + ")");
    positive(r_max, "r_max");
    positive(dt, "dt");
    positive(t_end, "t_end");
    if (nodes < 64) out.push_back("nodes must be >= 64 (got " + std::to_string(nodes) + ")");
    if (radii.empty()) out.push_back("radii must not be empty");
    for (double r : radii) positive(r, "radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) {
            out.push_back("radii must be strictly increasing");
            break;
        }
    if (alpha.empty()) out.push_back("alpha must not be empty");
    for (double a : alpha) positive(a, "alpha");
    if (verbosity < 0) out.push_back("verbosity must be >= 0");
    if (dt > 0.0 && t_end > 0.0 && dt > t_end) out.push_back("dt must not exceed t_end");
    if (dimension >= 1) {
        try {
            const auto v = validate(manifold());
            if (!v.empty()) out.push_back("manifold: " + describe(v));
        } catch (const Error& e) {
            out.push_back(std::string("manifold: ") + e.what());
        }
    }
    return out;
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::string section;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header '" + std::string(line) + "'", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "manifold" && section != "numerics" && section != "outputs")
                throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key(trim(line.substr(0, eq)));
        std::string_view rhs = trim(line.substr(eq + 1));
        const auto known = key_sections().find(key);
        if (known == key_sections().end()) throw ConfigError("unknown key '" + key + "'", line_no);
        if (section.empty()) throw ConfigError("key '" + key + "' appears before any section", line_no);
        if (known->second != section)
            throw ConfigError("key '" + key + "' belongs in [" + known->second + "], not [" + section + "]", line_no);
        if (const auto prev = seen.find(key); prev != seen.end())
            throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")",
                              line_no);
        seen.emplace(key, line_no);

        Value v{std::string(rhs), false, line_no};
        if (!rhs.empty() && rhs.front() == '"') {
            if (rhs.size() < 2 || rhs.back() != '"' || rhs.substr(1, rhs.size() - 2).find('"') != std::string_view::npos)
                throw ConfigError("unterminated or malformed quoted value", line_no);
            v.text = std::string(rhs.substr(1, rhs.size() - 2));
            v.quoted = true;
        }
        if (v.text.empty() && !v.quoted) throw ConfigError("missing value for '" + key + "'", line_no);

        if (key == "dimension") c.dimension = static_cast<int>(to_integer(v, key));
        else if (key == "sigma") c.sigma = to_expression(v, key);
        else if (key == "rho") c.rho = to_expression(v, key);
        else if (key == "potential") c.potential = to_expression(v, key);
        else if (key == "r_max") c.r_max = to_double(v, key);
        else if (key == "radii") c.radii = to_list(v, key);
        else if (key == "nodes") {
            const long long n = to_integer(v, key);
            if (n < 0) throw ConfigError("nodes must be nonnegative", line_no);
            c.nodes = static_cast<std::size_t>(n);
        } else if (key == "dt") c.dt = to_double(v, key);
        else if (key == "t_end") c.t_end = to_double(v, key);
        else if (key == "alpha") c.alpha = to_list(v, key);
        else if (key == "report") c.report = v.text;
        else if (key == "csv_dir") c.csv_dir = v.text;
        else if (key == "verbosity") c.verbosity = static_cast<int>(to_integer(v, key));
    }
    auto problems = c.problems();
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(buf.str());
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream os;
    os << "[manifold]\n"
       << "dimension = " << c.dimension << "\n"
       << "sigma = " << quote(c.sigma) << "\n"
       << "rho = " << quote(c.rho) << "\n"
       << "potential = " << quote(c.potential) << "\n\n"
       << "[numerics]\n"
       << "r_max = " << csv::number(c.r_max) << "\n"
       << "radii = " << list_text(c.radii) << "\n"
       << "nodes = " << c.nodes << "\n"
       << "dt = " << csv::number(c.dt) << "\n"
       << "t_end = " << csv::number(c.t_end) << "\n"
       << "alpha = " << list_text(c.alpha) << "\n\n"
       << "[outputs]\n";
    if (c.report) os << "report = " << quote(*c.report) << "\n";
    if (c.csv_dir) os << "csv_dir = " << quote(*c.csv_dir) << "\n";
    os << "verbosity = " << c.verbosity << "\n";
    return os.str();
}

}  // namespace heatcons
