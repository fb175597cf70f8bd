#pragma once

#include "heatcons/analysis.hpp"
#include "heatcons/error.hpp"
#include "heatcons/manifold.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heatcons {

/// Configuration problem. `line()` is 0 for problems not tied to a line.
class ConfigError : public ValidationError {
public:
    ConfigError(const std::string& message, std::size_t line = 0);
    explicit ConfigError(std::vector<std::string> problems);

    std::size_t line() const noexcept { return line_; }
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::size_t line_ = 0;
    std::vector<std::string> problems_;
};

struct RunConfig {
    // [manifold]
    int dimension = 2;
    std::string sigma = "r";
    std::string rho = "1";
    std::string potential = "0";
    // [numerics]
    double r_max = 10.0;
    std::vector<double> radii{4.0, 5.0, 6.0};
    std::size_t nodes = 2048;
    double dt = 1e-3;
    double t_end = 1.0;
    std::vector<double> alpha{1.0};
    // [outputs]
    std::optional<std::string> report;
    std::optional<std::string> csv_dir;
    int verbosity = 1;

    ManifoldSpec manifold() const;
    /// Probe time of the semigroup sweep is t_end.
    AnalysisParams analysis_params() const;
    /// Every problem found, empty when the config is usable.
    std::vector<std::string> problems() const;
};

/// Parses the line-based format:
///   # comment
///   [manifold]
///   sigma = "r*exp(r^3)"
///   [numerics]
///   radii = 4, 5, 6
/// Syntax errors throw ConfigError naming the line; validation problems are
/// collected and thrown together.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const RunConfig& c);

}  // namespace heatcons
