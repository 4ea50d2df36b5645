#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scplan/chain.hpp"
#include "scplan/stochastic.hpp"

namespace scplan {

struct ScenarioSpec {
  std::string name;
  ChainConfig chain;
  DemandSpec demand;
  LeadTimeSpec lead_time;
};

/// The 17 catalog names in table order.
const std::vector<std::string>& builtin_scenario_names();

/// Throws ConfigError("unknown scenario ...") for names outside the catalog.
ScenarioSpec builtin_scenario(const std::string& name);

/// Chain, demand and lead-time checks combined.
ValidationResult validate_scenario(const ScenarioSpec& scenario);

/// Throws ConfigError listing every violation.
void require_valid(const ScenarioSpec& scenario);

/// INI-style scenario files with [scenario], [chain], [demand] and
/// [lead_time] sections.
ScenarioSpec read_scenario(std::istream& in);
ScenarioSpec load_scenario_file(const std::string& path);
void write_scenario(std::ostream& out, const ScenarioSpec& scenario);

/// A catalog name, or a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& name_or_path);

}  // namespace scplan
