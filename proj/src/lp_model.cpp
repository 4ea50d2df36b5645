#include "scplan/lp_model.hpp"

#include <string>

namespace scplan {

namespace {

std::string var_name(const char* kind, int entity, int step) {
  return std::string(kind) + "_" + std::to_string(entity) + "_" + std::to_string(step);
}

}  // namespace

DeterministicScenario forecast_scenario(const ScenarioSpec& scenario) {
  const ChainConfig& c = scenario.chain;
  const auto h = static_cast<std::size_t>(c.horizon);
  DeterministicScenario det;
  det.demand.assign(c.retailers().size(), std::vector<double>(h));
  for (auto& row : det.demand)
    for (std::size_t t = 1; t <= h; ++t)
      row[t - 1] = forecast_demand(scenario.demand, static_cast<int>(t), c.horizon);
  det.production_lead.assign(c.suppliers().size(),
                             std::vector<int>(h, scenario.lead_time.average));
  det.transport_lead.assign(c.links.size(), std::vector<int>(h, scenario.lead_time.average));
  return det;
}

DeterministicScenario realized_scenario(const ScenarioSpec& scenario,
                                        const EpisodeRealization& realization) {
  const ChainConfig& c = scenario.chain;
  const int h = c.horizon;
  const auto suppliers = c.suppliers();
  DeterministicScenario det;
  det.demand.assign(c.retailers().size(), std::vector<double>(static_cast<std::size_t>(h)));
  for (std::size_t k = 0; k < det.demand.size(); ++k)
    for (int t = 1; t <= h; ++t) det.demand[k][t - 1] = realization.demand(static_cast<int>(k), t);
  det.production_lead.assign(suppliers.size(), std::vector<int>(static_cast<std::size_t>(h)));
  for (std::size_t i = 0; i < suppliers.size(); ++i)
    for (int t = 1; t <= h; ++t)
      det.production_lead[i][t - 1] = realization.production_lead_time(suppliers[i], t);
  det.transport_lead.assign(c.links.size(), std::vector<int>(static_cast<std::size_t>(h)));
  for (std::size_t l = 0; l < c.links.size(); ++l)
    for (int t = 1; t <= h; ++t)
      det.transport_lead[l][t - 1] = realization.transport_lead_time(static_cast<int>(l), t);
  return det;
}

LpInstance build_lp(const ScenarioSpec& scenario, const DeterministicScenario& det) {
  require_valid(scenario);
  const ChainConfig& c = scenario.chain;
  const int h = c.horizon;
  const int q = c.num_nodes();
  const int max_lead = scenario.lead_time.maximum;
  const auto suppliers = c.suppliers();
  const auto retailers = c.retailers();

  const auto covers = [h](const auto& rows, std::size_t count) {
    if (rows.size() != count) return false;
    for (const auto& r : rows)
      if (r.size() != static_cast<std::size_t>(h)) return false;
    return true;
  };
  if (!covers(det.demand, retailers.size()) || !covers(det.production_lead, suppliers.size()) ||
      !covers(det.transport_lead, c.links.size()))
    throw ConfigError("deterministic scenario does not cover steps 1.." + std::to_string(h));
  const auto check_leads = [max_lead](const std::vector<std::vector<int>>& rows) {
    for (const auto& r : rows)
      for (int l : r)
        if (l < 1 || l > max_lead) throw ConfigError("lead time " + std::to_string(l) + " out of range");
  };
  check_leads(det.production_lead);
  check_leads(det.transport_lead);

  LpInstance inst;
  inst.horizon = h;
  inst.index_steps = h + max_lead + 1;
  inst.demand = det.demand;
  LpProblem& lp = inst.problem;
  const auto H = static_cast<std::size_t>(h);

  std::vector<int> retailer_ordinal(static_cast<std::size_t>(q), -1);
  for (std::size_t k = 0; k < retailers.size(); ++k) retailer_ordinal[retailers[k]] = static_cast<int>(k);

  inst.stock.assign(static_cast<std::size_t>(q), std::vector<int>(H, -1));
  inst.discarded.assign(static_cast<std::size_t>(q), std::vector<int>(H, -1));
  inst.processed.assign(static_cast<std::size_t>(q), std::vector<int>(H, -1));
  inst.production.assign(suppliers.size(), std::vector<int>(H, -1));
  inst.shipment.assign(c.links.size(), std::vector<int>(H, -1));
  inst.unmet.assign(retailers.size(), std::vector<int>(H, -1));

  for (int t = 1; t <= h; ++t) {
    for (int n = 0; n < q; ++n) {
      inst.stock[n][t - 1] = lp.add_variable(var_name("stock", n, t), c.stock_cost[n]);
      inst.discarded[n][t - 1] = lp.add_variable(var_name("discard", n, t), c.excess_penalty);
      if (c.is_factory[n])
        inst.processed[n][t - 1] =
            lp.add_variable(var_name("processed", n, t), c.processing_cost[n], 0.0, c.processing_cap[n]);
    }
    for (std::size_t i = 0; i < suppliers.size(); ++i) {
      const int n = suppliers[i];
      inst.production[i][t - 1] = lp.add_variable(var_name("produce", n, t), c.production_cost[n],
                                                  0.0, c.production_cap[n]);
    }
    for (std::size_t l = 0; l < c.links.size(); ++l) {
      const int src = c.links[l].source;
      inst.shipment[l][t - 1] = lp.add_variable(var_name("ship", static_cast<int>(l), t),
                                                c.transport_cost / c.processing_ratio[src]);
    }
    for (std::size_t k = 0; k < retailers.size(); ++k)
      inst.unmet[k][t - 1] = lp.add_variable(var_name("unmet", retailers[k], t), c.unmet_penalty,
                                             0.0, det.demand[k][t - 1]);
  }

  // Arrivals per (node, step): fixed initial material and planned variables.
  std::vector<std::vector<double>> fixed_arrivals(static_cast<std::size_t>(q), std::vector<double>(H + 1, 0.0));
  std::vector<std::vector<std::vector<LpTerm>>> arrivals(
      static_cast<std::size_t>(q), std::vector<std::vector<LpTerm>>(H + 1));
  for (int n = 0; n < q; ++n)
    for (std::size_t k = 0; k < c.initial_production[n].size() && k < H; ++k)
      fixed_arrivals[n][k + 1] += c.initial_production[n][k];
  for (std::size_t l = 0; l < c.links.size(); ++l)
    for (std::size_t k = 0; k < c.initial_transport[l].size() && k < H; ++k)
      fixed_arrivals[c.links[l].dest][k + 1] += c.initial_transport[l][k];
  for (std::size_t i = 0; i < suppliers.size(); ++i)
    for (int k = 1; k <= h; ++k) {
      const int due = k + det.production_lead[i][k - 1];
      if (due <= h) arrivals[suppliers[i]][due].push_back({inst.production[i][k - 1], 1.0});
    }
  for (std::size_t l = 0; l < c.links.size(); ++l) {
    const Link& link = c.links[l];
    for (int k = 1; k <= h; ++k) {
      const int due = k + det.transport_lead[l][k - 1];
      if (due <= h)
        arrivals[link.dest][due].push_back(
            {inst.shipment[l][k - 1], 1.0 / c.processing_ratio[link.source]});
    }
  }

  for (int t = 1; t <= h; ++t) {
    for (int n = 0; n < q; ++n) {
      const double initial = t == 1 ? c.initial_stock[n] : 0.0;
      const int prev = t > 1 ? inst.stock[n][t - 2] : -1;
      const auto out_links = c.outgoing_links(n);

      // End-of-step stock = previous + arrivals - discard - demand met - outbound.
      std::vector<LpTerm> balance{{inst.stock[n][t - 1], 1.0}, {inst.discarded[n][t - 1], 1.0}};
      if (prev >= 0) balance.push_back({prev, -1.0});
      for (const auto& a : arrivals[n][t]) balance.push_back({a.var, -a.coef});
      for (int l : out_links) balance.push_back({inst.shipment[l][t - 1], 1.0});
      double rhs = initial + fixed_arrivals[n][t];
      const int r = retailer_ordinal[n];
      if (r >= 0) {
        balance.push_back({inst.unmet[r][t - 1], -1.0});
        rhs -= det.demand[r][t - 1];
      }
      lp.add_row(var_name("balance", n, t), std::move(balance), RowSense::equal, rhs);

      // Stock after arrivals and discard stays within capacity.
      std::vector<LpTerm> cap{{inst.discarded[n][t - 1], -1.0}};
      if (prev >= 0) cap.push_back({prev, 1.0});
      for (const auto& a : arrivals[n][t]) cap.push_back(a);
      lp.add_row(var_name("stockcap", n, t), std::move(cap), RowSense::less_equal,
                 c.stock_cap[n] - initial - fixed_arrivals[n][t]);

      if (out_links.empty()) continue;
      std::vector<LpTerm> outbound;
      for (int l : out_links) outbound.push_back({inst.shipment[l][t - 1], 1.0});
      lp.add_row(var_name("transportcap", n, t), outbound, RowSense::less_equal, c.transport_cap[n]);
      if (c.is_factory[n]) {
        std::vector<LpTerm> processing{{inst.processed[n][t - 1], 1.0}};
        for (const auto& term : outbound) processing.push_back({term.var, -1.0});
        lp.add_row(var_name("processing", n, t), std::move(processing), RowSense::equal, 0.0);
      }
    }
  }
  return inst;
}

}  // namespace scplan
