#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scplan/scenario.hpp"
#include "scplan/stochastic.hpp"

namespace scplan {

/// Raised when a caller hands the simulator an action outside the feasible set.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Demands and lead times of one episode, as pure functions of the episode
/// seed. The simulator and the perfect-information LP both read from here.
class EpisodeRealization {
 public:
  EpisodeRealization(const ScenarioSpec& scenario, std::uint64_t seed);

  std::uint64_t seed() const { return rng_.seed(); }
  /// Demand of the retailer with ordinal `retailer` at step t (1-based).
  double demand(int retailer, int t) const;
  /// Lead time of a production batch started at dispatch step k by `supplier`.
  int production_lead_time(int supplier, int k) const;
  /// Lead time of a shipment dispatched at step k over `link`.
  int transport_lead_time(int link, int k) const;

 private:
  DemandSpec demand_;
  LeadTimeSpec lead_time_;
  int horizon_;
  RngStream rng_;
};

enum class CostType { production, processing, transport, stock, excess_penalty, unmet_penalty };
inline constexpr int kNumCostTypes = 6;
const char* cost_type_name(CostType type);

/// Indexed by CostType; column order in every CSV export.
struct CostBreakdown {
  std::array<double, kNumCostTypes> values{};

  double& operator[](CostType t) { return values[static_cast<int>(t)]; }
  double operator[](CostType t) const { return values[static_cast<int>(t)]; }
  double total() const;
  CostBreakdown& operator+=(const CostBreakdown& other);
};

struct SupplyChainState {
  int t = 0;
  int horizon = 0;
  std::vector<double> stocks;
  // production_pipeline[node][d] = units due at step t + 1 + d; empty rows for
  // non-suppliers.
  std::vector<std::vector<double>> production_pipeline;
  // transport_pipeline[link][d] = units due at step t + 1 + d.
  std::vector<std::vector<double>> transport_pipeline;
  // Demand of each retailer for step t + 1.
  std::vector<double> next_demands;

  /// Units due at the node at step t + 1 (production or summed incoming links).
  double arriving_next(const ChainConfig& config, int node) const;
  /// Units due at the node after step t + 1.
  double arriving_later(const ChainConfig& config, int node) const;
};

/// Stock a node can dispatch from at the next step: current stock plus the
/// next arrivals, capped at the stock capacity.
double dispatchable_stock(const SupplyChainState& state, const ChainConfig& config, int node);

/// Stocks, per node (arriving next, arriving later), retailer demands, and
/// remaining steps, in physical units.
struct Observation {
  std::vector<double> values;
};

Observation build_observation(const SupplyChainState& state, const ChainConfig& config);

/// Production per supplier and shipment per link in physical units. Factory
/// shipments are raw material consumed; the product shipped is raw / r.
struct RawAction {
  std::vector<double> production;  // indexed like ChainConfig::suppliers()
  std::vector<double> shipments;   // indexed like ChainConfig::links

  static RawAction zeros(const ChainConfig& config);
};

/// Empty string when feasible for the state, otherwise the violated bound.
std::string check_raw_action(const RawAction& action, const SupplyChainState& state,
                             const ChainConfig& config);

/// Physical flows of one step, for mass-balance checks and traces.
struct StepFlows {
  std::vector<double> stock_before;
  std::vector<double> arrived;
  std::vector<double> discarded;
  std::vector<double> demand;       // per node; zero outside retailers
  std::vector<double> demand_met;   // per node
  std::vector<double> unmet;        // per node
  std::vector<double> outbound;     // stock consumed by shipments (raw at factories)
  std::vector<double> shipped;      // units entering transport (product at factories)
  std::vector<double> produced;     // per node; zero outside suppliers
  std::vector<double> stock_after;
  std::vector<CostBreakdown> node_costs;
};

struct StepOutcome {
  double reward = 0.0;
  CostBreakdown costs;
  std::vector<double> unmet_units;      // per retailer
  std::vector<double> discarded_units;  // per node
  bool done = false;
  StepFlows flows;
};

/// One episode of the supply chain MDP. Single-threaded; independent instances
/// may run concurrently.
class Simulator {
 public:
  explicit Simulator(ScenarioSpec scenario);

  Observation reset(std::uint64_t seed);
  StepOutcome step(const RawAction& action);

  const SupplyChainState& state() const { return state_; }
  const ScenarioSpec& scenario() const { return scenario_; }
  const ChainConfig& chain() const { return scenario_.chain; }
  const EpisodeRealization& realization() const;
  Observation observation() const { return build_observation(state_, scenario_.chain); }
  bool done() const { return state_.t >= state_.horizon; }

 private:
  ScenarioSpec scenario_;
  std::vector<int> suppliers_;
  std::vector<int> retailers_;
  std::vector<int> retailer_ordinal_;
  std::optional<EpisodeRealization> realization_;
  SupplyChainState state_;
};

}  // namespace scplan
