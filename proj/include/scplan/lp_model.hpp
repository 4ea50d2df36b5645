#pragma once

#include <vector>

#include "scplan/lp_problem.hpp"
#include "scplan/lp_solver.hpp"
#include "scplan/scenario.hpp"
#include "scplan/simulator.hpp"

namespace scplan {

/// Demands and lead times the plan is built against.
struct DeterministicScenario {
  std::vector<std::vector<double>> demand;          // [retailer ordinal][t - 1], t = 1..h
  std::vector<std::vector<int>> production_lead;    // [supplier ordinal][k - 1], dispatch step k
  std::vector<std::vector<int>> transport_lead;     // [link][k - 1]
};

/// Unperturbed demand curve and average lead times.
DeterministicScenario forecast_scenario(const ScenarioSpec& scenario);
/// True demands and lead times of one episode.
DeterministicScenario realized_scenario(const ScenarioSpec& scenario,
                                        const EpisodeRealization& realization);

/// The deterministic planning LP with its variable index maps. Steps are
/// 1-based; the vectors below are indexed by step - 1 and hold -1 where a
/// variable does not exist.
struct LpInstance {
  LpProblem problem;
  int horizon = 0;
  int index_steps = 0;  // h + max lead time + 1
  std::vector<std::vector<int>> stock;       // [node][t - 1], end-of-step stock
  std::vector<std::vector<int>> production;  // [supplier ordinal][k - 1], dispatched at k
  std::vector<std::vector<int>> shipment;    // [link][k - 1], stock consumed at the source
  std::vector<std::vector<int>> processed;   // [node][k - 1], raw processed at factories
  std::vector<std::vector<int>> discarded;   // [node][t - 1]
  std::vector<std::vector<int>> unmet;       // [retailer ordinal][t - 1]
  std::vector<std::vector<double>> demand;   // [retailer ordinal][t - 1]
};

/// Throws ConfigError when `det` does not cover steps 1..h or its lead times
/// fall outside [1, maximum].
LpInstance build_lp(const ScenarioSpec& scenario, const DeterministicScenario& det);

}  // namespace scplan
