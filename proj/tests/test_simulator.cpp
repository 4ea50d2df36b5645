#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "scplan/codec.hpp"
#include "scplan/scenario.hpp"
#include "scplan/simulator.hpp"

using namespace scplan;

namespace {

// Catalog chain with constant lead times and a flat, unperturbed demand.
ScenarioSpec flat_scenario(ChainConfig chain, double demand) {
  ScenarioSpec s;
  s.name = "flat";
  s.chain = std::move(chain);
  s.demand.kind = DemandKind::regular;
  s.demand.regular_mean = demand;
  s.demand.sin_min = 0;
  s.demand.sin_max = 0;
  s.lead_time = {LeadTimeSpec::Kind::constant, 2, 4};
  return s;
}

ChainConfig empty_chain() {
  ChainConfig c = default_chain();
  c.initial_stock.assign(8, 0.0);
  for (auto& p : c.initial_production) p.clear();
  for (auto& t : c.initial_transport) t.clear();
  return c;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST(Reset, InitialObservation) {
  Simulator sim(builtin_scenario("N20"));
  const Observation obs = sim.reset(1);
  ASSERT_EQ(obs.values.size(), 27u);
  for (int n = 0; n < 8; ++n) EXPECT_EQ(obs.values[n], 800);
  EXPECT_EQ(obs.values[8 + 0], 600);   // supplier1 arriving next
  EXPECT_EQ(obs.values[8 + 1], 600);   // supplier1 arriving later
  EXPECT_EQ(obs.values[8 + 2], 840);   // supplier2 arriving next
  EXPECT_EQ(obs.values[8 + 4], 600);   // factory1 arriving next
  EXPECT_EQ(obs.values[8 + 6], 840);   // factory2 arriving next
  EXPECT_EQ(obs.values[8 + 8], 480);   // wholesaler1 arriving next
  EXPECT_EQ(obs.values[26], 360);
  EXPECT_EQ(sim.state().t, 0);
}

TEST(Reset, InvalidScenarioIsRejected) {
  ScenarioSpec s = builtin_scenario("N20");
  s.chain.stock_cap[0] = 10;
  EXPECT_THROW(Simulator{s}, ConfigError);
}

TEST(Observation, PipelineSummaries) {
  const ChainConfig c = default_chain();
  SupplyChainState st;
  st.horizon = 360;
  st.t = 30;
  st.stocks.assign(8, 0.0);
  st.production_pipeline.assign(8, {});
  st.production_pipeline[0] = {0, 0, 0, 0};
  st.production_pipeline[1] = {330, 60, 45, 0};
  st.transport_pipeline.assign(12, std::vector<double>(4, 0.0));
  st.transport_pipeline[c.link_index(0, 2)] = {130, 200, 0, 0};
  st.transport_pipeline[c.link_index(1, 2)] = {150, 100, 100, 20};
  st.next_demands = {138, 0};
  const Observation obs = build_observation(st, c);
  EXPECT_EQ(obs.values[8 + 2], 330);
  EXPECT_EQ(obs.values[8 + 3], 105);
  EXPECT_EQ(obs.values[8 + 4], 280);
  EXPECT_EQ(obs.values[8 + 5], 420);
  EXPECT_EQ(obs.values[8 + 0], 0);
  EXPECT_EQ(obs.values[8 + 1], 0);
  EXPECT_EQ(obs.values[24], 138);
  EXPECT_EQ(obs.values[26], 330);
}

TEST(Step, UnmetDemandIsLostAndPenalized) {
  ChainConfig c = empty_chain();
  c.initial_stock[6] = 100;
  Simulator sim(flat_scenario(c, 138));
  sim.reset(3);
  const StepOutcome out = sim.step(RawAction::zeros(c));
  EXPECT_DOUBLE_EQ(out.unmet_units[0], 38);
  EXPECT_DOUBLE_EQ(out.flows.node_costs[6][CostType::unmet_penalty], 38 * 216);
  EXPECT_DOUBLE_EQ(sim.state().stocks[6], 0);
  EXPECT_DOUBLE_EQ(out.unmet_units[1], 138);
}

TEST(Step, ExcessArrivalIsDiscarded) {
  ChainConfig c = empty_chain();
  c.initial_stock[4] = 1500;
  c.initial_transport[c.link_index(2, 4)] = {150};
  c.initial_transport[c.link_index(3, 4)] = {150};
  Simulator sim(flat_scenario(c, 0));
  sim.reset(3);
  const StepOutcome out = sim.step(RawAction::zeros(c));
  EXPECT_DOUBLE_EQ(out.discarded_units[4], 200);
  EXPECT_DOUBLE_EQ(out.costs[CostType::excess_penalty], 2000);
  EXPECT_DOUBLE_EQ(sim.state().stocks[4], 1600);
  EXPECT_DOUBLE_EQ(out.costs[CostType::stock], 1600);
}

TEST(Step, IdleEmptyChainCostsNothing) {
  Simulator sim(flat_scenario(empty_chain(), 0));
  sim.reset(3);
  const StepOutcome out = sim.step(RawAction::zeros(sim.chain()));
  EXPECT_EQ(out.reward, 0.0);
  for (double v : out.costs.values) EXPECT_EQ(v, 0.0);
}

TEST(Step, FactoryShipsProductAtRatio) {
  ChainConfig c = empty_chain();
  c.initial_stock[2] = 300;
  Simulator sim(flat_scenario(c, 0));
  sim.reset(3);
  RawAction a = RawAction::zeros(c);
  const int link = c.link_index(2, 4);
  a.shipments[link] = 220;
  const StepOutcome out = sim.step(a);
  EXPECT_DOUBLE_EQ(out.flows.outbound[2], 220);
  EXPECT_NEAR(out.flows.shipped[2], 220.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(out.costs[CostType::processing], 220 * 12);
  EXPECT_NEAR(out.costs[CostType::transport], 2 * 220.0 / 3.0, 1e-12);
  EXPECT_NEAR(sim.state().transport_pipeline[link][1], 220.0 / 3.0, 1e-12);  // lead time 2
  EXPECT_DOUBLE_EQ(sim.state().stocks[2], 80);
}

TEST(Step, ProductionEntersPipelineAtLeadTime) {
  Simulator sim(flat_scenario(empty_chain(), 0));
  sim.reset(3);
  RawAction a = RawAction::zeros(sim.chain());
  a.production = {100, 50};
  const StepOutcome out = sim.step(a);
  EXPECT_DOUBLE_EQ(out.costs[CostType::production], 100 * 6 + 50 * 4);
  EXPECT_DOUBLE_EQ(sim.state().production_pipeline[0][1], 100);
  sim.step(RawAction::zeros(sim.chain()));
  EXPECT_DOUBLE_EQ(sim.state().stocks[0], 0);
  sim.step(RawAction::zeros(sim.chain()));
  EXPECT_DOUBLE_EQ(sim.state().stocks[0], 100);
  EXPECT_DOUBLE_EQ(sim.state().stocks[1], 50);
}

TEST(Step, InfeasibleActionsAreRejected) {
  Simulator sim(builtin_scenario("N20"));
  EXPECT_THROW(sim.step(RawAction::zeros(sim.chain())), ContractViolation);
  sim.reset(1);
  RawAction a = RawAction::zeros(sim.chain());
  a.production[0] = 601;
  EXPECT_THROW(sim.step(a), ContractViolation);
  a = RawAction::zeros(sim.chain());
  a.shipments[0] = 2000;  // supplier1 holds 800 + 600
  EXPECT_THROW(sim.step(a), ContractViolation);
  a = RawAction::zeros(sim.chain());
  a.shipments[sim.chain().link_index(2, 4)] = -1;
  EXPECT_THROW(sim.step(a), ContractViolation);
}

TEST(Episode, LengthAndDeterminism) {
  const ScenarioSpec s = builtin_scenario("N20");
  Simulator a(s), b(s);
  a.reset(42);
  b.reset(42);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(-1, 1);
  int steps = 0;
  while (!a.done()) {
    std::vector<double> act(14);
    for (double& v : act) v = u(gen);
    const StepOutcome x = a.step(decode_action(act, a.state(), a.chain()));
    const StepOutcome y = b.step(decode_action(act, b.state(), b.chain()));
    EXPECT_EQ(x.reward, y.reward);
    EXPECT_EQ(a.state().stocks, b.state().stocks);
    EXPECT_EQ(x.done, steps + 1 == 360);
    ++steps;
  }
  EXPECT_EQ(steps, 360);
  EXPECT_EQ(a.state().next_demands, (std::vector<double>{0, 0}));
  EXPECT_THROW(a.step(RawAction::zeros(a.chain())), ContractViolation);
}

TEST(Episode, MassBalanceAndRewardIdentity) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& name : builtin_scenario_names()) {
    const ScenarioSpec s = builtin_scenario(name);
    const ChainConfig& c = s.chain;
    Simulator sim(s);
    sim.reset(1000 + gen() % 1000);
    while (!sim.done()) {
      std::vector<double> act(14);
      for (double& v : act) v = u(gen);
      const StepOutcome out = sim.step(decode_action(act, sim.state(), c));
      const StepFlows& f = out.flows;
      for (int n = 0; n < 8; ++n) {
        const double consumed = c.is_factory[n] ? c.processing_ratio[n] * f.shipped[n] : f.shipped[n];
        const double expected = f.stock_before[n] + f.arrived[n] - f.discarded[n] - f.demand_met[n] - consumed;
        ASSERT_NEAR(f.stock_after[n], expected, 1e-9 * (1 + f.stock_before[n] + f.arrived[n])) << name << " node " << n;
        ASSERT_GE(f.stock_after[n], 0.0);
        ASSERT_LE(f.stock_after[n], c.stock_cap[n]);
      }
      double total = 0.0;
      for (double v : out.costs.values) total += v;
      ASSERT_NEAR(out.reward, -total, 1e-9 * std::abs(total));
      ASSERT_NEAR(sum(f.demand), sum(f.demand_met) + sum(f.unmet), 1e-9);
    }
  }
}
