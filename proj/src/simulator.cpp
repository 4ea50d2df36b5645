#include "scplan/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scplan {

namespace {

// Relative slack accepted on feasibility checks, for plans that went through
// floating-point encode/decode.
constexpr double kFeasibilitySlack = 1e-9;

bool exceeds(double value, double bound) {
  return value > bound + kFeasibilitySlack * std::max(1.0, std::abs(bound));
}

}  // namespace

EpisodeRealization::EpisodeRealization(const ScenarioSpec& scenario, std::uint64_t seed)
    : demand_(scenario.demand),
      lead_time_(scenario.lead_time),
      horizon_(scenario.chain.horizon),
      rng_(seed) {}

double EpisodeRealization::demand(int retailer, int t) const {
  return sample_demand(demand_, retailer, t, horizon_, rng_);
}

int EpisodeRealization::production_lead_time(int supplier, int k) const {
  return sample_lead_time(lead_time_, StreamPurpose::production_lead_time, supplier, k, rng_);
}

int EpisodeRealization::transport_lead_time(int link, int k) const {
  return sample_lead_time(lead_time_, StreamPurpose::transport_lead_time, link, k, rng_);
}

const char* cost_type_name(CostType type) {
  switch (type) {
    case CostType::production: return "production";
    case CostType::processing: return "processing";
    case CostType::transport: return "transport";
    case CostType::stock: return "stock";
    case CostType::excess_penalty: return "excess_penalty";
    case CostType::unmet_penalty: return "unmet_penalty";
  }
  return "unknown";
}

double CostBreakdown::total() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& other) {
  for (int i = 0; i < kNumCostTypes; ++i) values[i] += other.values[i];
  return *this;
}

double SupplyChainState::arriving_next(const ChainConfig& config, int node) const {
  double sum = 0.0;
  if (!production_pipeline[node].empty()) sum += production_pipeline[node][0];
  for (int l : config.incoming_links(node)) sum += transport_pipeline[l][0];
  return sum;
}

double SupplyChainState::arriving_later(const ChainConfig& config, int node) const {
  double sum = 0.0;
  const auto& prod = production_pipeline[node];
  for (std::size_t d = 1; d < prod.size(); ++d) sum += prod[d];
  for (int l : config.incoming_links(node)) {
    const auto& pipe = transport_pipeline[l];
    for (std::size_t d = 1; d < pipe.size(); ++d) sum += pipe[d];
  }
  return sum;
}

double dispatchable_stock(const SupplyChainState& state, const ChainConfig& config, int node) {
  return std::min(state.stocks[node] + state.arriving_next(config, node), config.stock_cap[node]);
}

Observation build_observation(const SupplyChainState& state, const ChainConfig& config) {
  Observation obs;
  obs.values.reserve(static_cast<std::size_t>(config.observation_size()));
  for (int n = 0; n < config.num_nodes(); ++n) obs.values.push_back(state.stocks[n]);
  for (int n = 0; n < config.num_nodes(); ++n) {
    obs.values.push_back(state.arriving_next(config, n));
    obs.values.push_back(state.arriving_later(config, n));
  }
  for (double d : state.next_demands) obs.values.push_back(d);
  obs.values.push_back(static_cast<double>(state.horizon - state.t));
  return obs;
}

RawAction RawAction::zeros(const ChainConfig& config) {
  RawAction a;
  a.production.assign(config.suppliers().size(), 0.0);
  a.shipments.assign(static_cast<std::size_t>(config.num_links()), 0.0);
  return a;
}

std::string check_raw_action(const RawAction& action, const SupplyChainState& state,
                             const ChainConfig& config) {
  const auto suppliers = config.suppliers();
  if (action.production.size() != suppliers.size() ||
      action.shipments.size() != config.links.size())
    return "action has the wrong shape";
  std::ostringstream os;
  for (std::size_t i = 0; i < suppliers.size(); ++i) {
    const int n = suppliers[i];
    const double q = action.production[i];
    if (!std::isfinite(q) || q < 0.0 || exceeds(q, config.production_cap[n])) {
      os << "production " << q << " at " << config.node_names[n] << " outside [0, "
         << config.production_cap[n] << "]";
      return os.str();
    }
  }
  for (int n = 0; n < config.num_nodes(); ++n) {
    double total = 0.0;
    for (int l : config.outgoing_links(n)) {
      const double q = action.shipments[l];
      if (!std::isfinite(q) || q < 0.0) {
        os << "negative or non-finite shipment on link " << l;
        return os.str();
      }
      total += q;
    }
    const double available = dispatchable_stock(state, config, n);
    if (exceeds(total, available)) {
      os << "shipments " << total << " from " << config.node_names[n]
         << " exceed dispatchable stock " << available;
      return os.str();
    }
    if (config.is_factory[n] && exceeds(total, config.processing_cap[n])) {
      os << "raw material " << total << " at " << config.node_names[n]
         << " exceeds processing capacity " << config.processing_cap[n];
      return os.str();
    }
  }
  return {};
}

Simulator::Simulator(ScenarioSpec scenario) : scenario_(std::move(scenario)) {
  require_valid(scenario_);
  suppliers_ = scenario_.chain.suppliers();
  retailers_ = scenario_.chain.retailers();
  retailer_ordinal_.assign(static_cast<std::size_t>(scenario_.chain.num_nodes()), -1);
  for (std::size_t k = 0; k < retailers_.size(); ++k)
    retailer_ordinal_[retailers_[k]] = static_cast<int>(k);
}

const EpisodeRealization& Simulator::realization() const {
  if (!realization_) throw ContractViolation("simulator used before reset()");
  return *realization_;
}

Observation Simulator::reset(std::uint64_t seed) {
  const ChainConfig& c = scenario_.chain;
  const auto depth = static_cast<std::size_t>(scenario_.lead_time.maximum);
  realization_.emplace(scenario_, seed);

  state_ = SupplyChainState{};
  state_.t = 0;
  state_.horizon = c.horizon;
  state_.stocks = c.initial_stock;
  state_.production_pipeline.assign(static_cast<std::size_t>(c.num_nodes()), {});
  for (int n : suppliers_) {
    auto& pipe = state_.production_pipeline[n];
    pipe.assign(depth, 0.0);
    const auto& initial = c.initial_production[n];
    for (std::size_t k = 0; k < initial.size() && k < depth; ++k) pipe[k] = initial[k];
  }
  state_.transport_pipeline.assign(c.links.size(), std::vector<double>(depth, 0.0));
  for (std::size_t l = 0; l < c.links.size(); ++l) {
    const auto& initial = c.initial_transport[l];
    for (std::size_t k = 0; k < initial.size() && k < depth; ++k)
      state_.transport_pipeline[l][k] = initial[k];
  }
  state_.next_demands.resize(retailers_.size());
  for (std::size_t k = 0; k < retailers_.size(); ++k)
    state_.next_demands[k] = realization_->demand(static_cast<int>(k), 1);
  return observation();
}

StepOutcome Simulator::step(const RawAction& action) {
  if (!realization_) throw ContractViolation("simulator used before reset()");
  if (done()) throw ContractViolation("episode already finished");
  const ChainConfig& c = scenario_.chain;
  if (auto why = check_raw_action(action, state_, c); !why.empty())
    throw ContractViolation("infeasible action: " + why);

  const auto q = static_cast<std::size_t>(c.num_nodes());
  StepOutcome out;
  StepFlows& f = out.flows;
  f.stock_before = state_.stocks;
  f.arrived.assign(q, 0.0);
  f.discarded.assign(q, 0.0);
  f.demand.assign(q, 0.0);
  f.demand_met.assign(q, 0.0);
  f.unmet.assign(q, 0.0);
  f.outbound.assign(q, 0.0);
  f.shipped.assign(q, 0.0);
  f.produced.assign(q, 0.0);
  f.node_costs.assign(q, CostBreakdown{});

  // Advance time.
  const int t = state_.t + 1;
  auto& stocks = state_.stocks;

  // Material flow: everything due now enters stock, excess is discarded.
  for (int n : suppliers_) {
    auto& pipe = state_.production_pipeline[n];
    f.arrived[n] += pipe.front();
    std::rotate(pipe.begin(), pipe.begin() + 1, pipe.end());
    pipe.back() = 0.0;
  }
  for (std::size_t l = 0; l < c.links.size(); ++l) {
    auto& pipe = state_.transport_pipeline[l];
    f.arrived[c.links[l].dest] += pipe.front();
    std::rotate(pipe.begin(), pipe.begin() + 1, pipe.end());
    pipe.back() = 0.0;
  }
  for (std::size_t n = 0; n < q; ++n) {
    const double level = stocks[n] + f.arrived[n];
    if (level > c.stock_cap[n]) {
      f.discarded[n] = level - c.stock_cap[n];
      stocks[n] = c.stock_cap[n];
    } else {
      stocks[n] = level;
    }
    f.node_costs[n][CostType::excess_penalty] = c.excess_penalty * f.discarded[n];
  }

  // Retailers serve the demand realized for this step; shortfall is lost.
  for (std::size_t k = 0; k < retailers_.size(); ++k) {
    const int n = retailers_[k];
    const double demand = state_.next_demands[k];
    const double met = std::min(stocks[n], demand);
    stocks[n] -= met;
    f.demand[n] = demand;
    f.demand_met[n] = met;
    f.unmet[n] = demand - met;
    f.node_costs[n][CostType::unmet_penalty] = c.unmet_penalty * f.unmet[n];
  }

  // Agent decisions: production batches and shipments with fresh lead times.
  const EpisodeRealization& world = *realization_;
  for (std::size_t i = 0; i < suppliers_.size(); ++i) {
    const int n = suppliers_[i];
    const double qty = std::min(action.production[i], c.production_cap[n]);
    const int lead = world.production_lead_time(n, t);
    state_.production_pipeline[n][static_cast<std::size_t>(lead - 1)] += qty;
    f.produced[n] = qty;
    f.node_costs[n][CostType::production] = c.production_cost[n] * qty;
  }
  for (int n = 0; n < c.num_nodes(); ++n) {
    const auto out_links = c.outgoing_links(n);
    if (out_links.empty()) continue;
    double requested = 0.0;
    for (int l : out_links) requested += action.shipments[l];
    // Absorbs the rounding slack tolerated by check_raw_action.
    const double scale = requested > stocks[n] ? stocks[n] / requested : 1.0;
    const double ratio = c.processing_ratio[n];
    for (int l : out_links) {
      const double consumed = action.shipments[l] * scale;
      const double product = c.is_factory[n] ? consumed / ratio : consumed;
      const int lead = world.transport_lead_time(l, t);
      state_.transport_pipeline[l][static_cast<std::size_t>(lead - 1)] += product;
      f.outbound[n] += consumed;
      f.shipped[n] += product;
    }
    stocks[n] = std::max(0.0, stocks[n] - f.outbound[n]);
    if (c.is_factory[n])
      f.node_costs[n][CostType::processing] = c.processing_cost[n] * f.outbound[n];
    f.node_costs[n][CostType::transport] = c.transport_cost * f.shipped[n];
  }

  for (std::size_t n = 0; n < q; ++n)
    f.node_costs[n][CostType::stock] = c.stock_cost[n] * stocks[n];
  f.stock_after = stocks;

  for (const auto& nc : f.node_costs) out.costs += nc;
  out.reward = -out.costs.total();
  out.discarded_units = f.discarded;
  for (int n : retailers_) out.unmet_units.push_back(f.unmet[n]);

  state_.t = t;
  out.done = done();
  for (std::size_t k = 0; k < retailers_.size(); ++k)
    state_.next_demands[k] = out.done ? 0.0 : world.demand(static_cast<int>(k), t + 1);
  return out;
}

}  // namespace scplan
