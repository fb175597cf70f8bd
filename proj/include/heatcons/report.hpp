#pragma once

#include "heatcons/analysis.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace heatcons {

/// A report is free text grouped in sections, followed by a flat
/// `key: value` block meant for scripts.
struct Report {
    std::string title;
    std::string spec_digest;
    std::vector<std::pair<std::string, std::vector<std::string>>> sections;
    std::vector<std::pair<std::string, std::string>> values;

    void add(const std::string& key, const std::string& value) { values.emplace_back(key, value); }
};

/// The timestamp line is the only part that varies between identical runs;
/// it is left out when `timestamp` is empty.
void render(std::ostream& os, const Report& r, const std::string& timestamp = {});
std::string render(const Report& r, const std::string& timestamp = {});

/// Current UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

void add_tail(Report& r, const std::string& prefix, const TailVerdict& v);
void add_khasminskii(Report& r, const std::string& prefix, const KhasminskiiResult& k);
void add_plateau(Report& r, const std::string& prefix, const SemigroupPlateau& p);

Report analysis_report(const ConservationReport& rep);
Report volume_report(const std::string& spec_digest, const TailVerdict& v, double a);
Report khasminskii_report(const std::string& spec_digest, const std::vector<std::pair<double, KhasminskiiResult>>& runs);
Report potential_report(const std::string& spec_digest, PotentialStrategy strategy, const PotentialResult& p);

}  // namespace heatcons
