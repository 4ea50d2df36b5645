#pragma once

#include <vector>

#include "scplan/agent.hpp"
#include "scplan/lp_model.hpp"

namespace scplan {

/// Open-loop schedule read off an optimal LP solution, by dispatch step.
struct LpPlan {
  int horizon = 0;
  double objective = 0.0;
  std::vector<std::vector<double>> production;  // [t - 1][supplier ordinal]
  std::vector<std::vector<double>> shipments;   // [t - 1][link], stock consumed
  std::vector<std::vector<double>> stocks;      // [t - 1][node], planned end-of-step stock
};

/// Throws SolverError unless the result is optimal.
LpPlan extract_plan(const LpInstance& instance, const LpResult& result);

/// Builds and solves the forecast LP.
LpPlan solve_forecast_plan(const ScenarioSpec& scenario, const IpmOptions& options = {});

/// Optimal cost of the episode had its demands and lead times been known.
double perfect_information_bound(const ScenarioSpec& scenario,
                                 const EpisodeRealization& realization,
                                 const IpmOptions& options = {});

/// Replays a plan. Each step's quantities are truncated proportionally to the
/// live cut base, encoded against the live state and decoded again.
class LpAgent : public Agent {
 public:
  explicit LpAgent(LpPlan plan) : plan_(std::move(plan)) {}

  std::string name() const override { return "lp"; }
  RawAction act(const Simulator& sim) override;
  const LpPlan& plan() const { return plan_; }

 private:
  LpPlan plan_;
};

}  // namespace scplan
