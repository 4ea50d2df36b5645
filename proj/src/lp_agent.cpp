#include "scplan/lp_agent.hpp"

#include <algorithm>

#include "scplan/codec.hpp"

namespace scplan {

LpPlan extract_plan(const LpInstance& instance, const LpResult& result) {
  if (result.status != LpStatus::optimal)
    throw SolverError(std::string("cannot extract a plan from a ") + lp_status_name(result.status) +
                      " solution");
  const auto value = [&](int var) { return var >= 0 ? std::max(0.0, result.x[var]) : 0.0; };
  LpPlan plan;
  plan.horizon = instance.horizon;
  plan.objective = result.objective;
  const auto H = static_cast<std::size_t>(instance.horizon);
  plan.production.assign(H, std::vector<double>(instance.production.size()));
  plan.shipments.assign(H, std::vector<double>(instance.shipment.size()));
  plan.stocks.assign(H, std::vector<double>(instance.stock.size()));
  for (std::size_t t = 0; t < H; ++t) {
    for (std::size_t i = 0; i < instance.production.size(); ++i)
      plan.production[t][i] = value(instance.production[i][t]);
    for (std::size_t l = 0; l < instance.shipment.size(); ++l)
      plan.shipments[t][l] = value(instance.shipment[l][t]);
    for (std::size_t n = 0; n < instance.stock.size(); ++n)
      plan.stocks[t][n] = value(instance.stock[n][t]);
  }
  return plan;
}

LpPlan solve_forecast_plan(const ScenarioSpec& scenario, const IpmOptions& options) {
  const LpInstance instance = build_lp(scenario, forecast_scenario(scenario));
  return extract_plan(instance, solve_lp(instance.problem, options));
}

double perfect_information_bound(const ScenarioSpec& scenario,
                                 const EpisodeRealization& realization,
                                 const IpmOptions& options) {
  const LpInstance instance = build_lp(scenario, realized_scenario(scenario, realization));
  const LpResult result = solve_lp(instance.problem, options);
  if (result.status != LpStatus::optimal)
    throw SolverError(std::string("perfect-information LP is ") + lp_status_name(result.status));
  return result.objective;
}

RawAction LpAgent::act(const Simulator& sim) {
  const ChainConfig& c = sim.chain();
  const SupplyChainState& state = sim.state();
  const int t = state.t + 1;
  if (t < 1 || t > plan_.horizon) throw ContractViolation("plan does not cover step " + std::to_string(t));

  RawAction planned = RawAction::zeros(c);
  const auto suppliers = c.suppliers();
  for (std::size_t i = 0; i < suppliers.size(); ++i)
    planned.production[i] = std::min(plan_.production[t - 1][i], c.production_cap[suppliers[i]]);
  for (int n = 0; n < c.num_nodes(); ++n) {
    const auto out_links = c.outgoing_links(n);
    double total = 0.0;
    for (int l : out_links) total += plan_.shipments[t - 1][l];
    const double base = cut_base(state, c, n);
    const double scale = total > base ? base / total : 1.0;
    for (int l : out_links) planned.shipments[l] = plan_.shipments[t - 1][l] * scale;
  }
  return decode_action(encode_plan(planned, state, c), state, c);
}

}  // namespace scplan
