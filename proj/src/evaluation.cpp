#include "scplan/evaluation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace scplan {

EvalPlan default_eval_plan() {
  return {{101, 202, 303, 404, 505, 606, 707, 808, 909, 1010}, 10};
}

std::vector<std::uint64_t> episode_seeds(const EvalPlan& plan) {
  if (plan.episodes_per_seed < 1) throw std::invalid_argument("episodes per seed must be positive");
  std::vector<std::uint64_t> out;
  for (std::uint64_t seed : plan.seeds)
    for (int e = 0; e < plan.episodes_per_seed; ++e)
      out.push_back(RngStream(seed).derive(StreamPurpose::evaluation, static_cast<std::uint64_t>(e)));
  return out;
}

std::uint64_t realization_digest(const ScenarioSpec& scenario, const EpisodeRealization& realization) {
  const ChainConfig& c = scenario.chain;
  std::uint64_t h = 0x5CA1AB1Eu;
  const auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ v); };
  const auto retailers = c.retailers().size();
  for (int t = 1; t <= c.horizon; ++t) {
    for (std::size_t k = 0; k < retailers; ++k)
      mix(std::bit_cast<std::uint64_t>(realization.demand(static_cast<int>(k), t)));
    for (int n : c.suppliers()) mix(static_cast<std::uint64_t>(realization.production_lead_time(n, t)));
    for (int l = 0; l < c.num_links(); ++l)
      mix(static_cast<std::uint64_t>(realization.transport_lead_time(l, t)));
  }
  return h;
}

const char* trace_metric_name(TraceMetric m) {
  switch (m) {
    case TraceMetric::stock: return "stock";
    case TraceMetric::production: return "production";
    case TraceMetric::transport: return "transport";
    case TraceMetric::unmet: return "unmet";
    case TraceMetric::demand: return "demand";
    case TraceMetric::discarded: return "discarded";
  }
  return "unknown";
}

void TraceAggregate::add(const std::vector<StepOutcome>& steps) {
  if (episodes == 0) {
    sum.assign(steps.size(), {});
    sum_sq.assign(steps.size(), {});
  }
  if (steps.size() != sum.size()) throw std::invalid_argument("episodes of different lengths");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const StepFlows& f = steps[t].flows;
    std::array<double, kNumTraceMetrics> v{};
    for (std::size_t n = 0; n < f.stock_after.size(); ++n) {
      v[static_cast<int>(TraceMetric::stock)] += f.stock_after[n];
      v[static_cast<int>(TraceMetric::production)] += f.produced[n];
      v[static_cast<int>(TraceMetric::transport)] += f.shipped[n];
      v[static_cast<int>(TraceMetric::unmet)] += f.unmet[n];
      v[static_cast<int>(TraceMetric::demand)] += f.demand[n];
      v[static_cast<int>(TraceMetric::discarded)] += f.discarded[n];
    }
    for (int m = 0; m < kNumTraceMetrics; ++m) {
      sum[t][m] += v[m];
      sum_sq[t][m] += v[m] * v[m];
    }
  }
  ++episodes;
}

void TraceAggregate::merge(const TraceAggregate& other) {
  if (other.episodes == 0) return;
  if (episodes == 0) {
    *this = other;
    return;
  }
  if (other.sum.size() != sum.size()) throw std::invalid_argument("traces of different lengths");
  for (std::size_t t = 0; t < sum.size(); ++t)
    for (int m = 0; m < kNumTraceMetrics; ++m) {
      sum[t][m] += other.sum[t][m];
      sum_sq[t][m] += other.sum_sq[t][m];
    }
  episodes += other.episodes;
}

MeanStd TraceAggregate::stats(int t, TraceMetric metric) const {
  const auto m = static_cast<int>(metric);
  MeanStd out;
  if (episodes == 0) return out;
  const double n = episodes;
  out.mean = sum[t - 1][m] / n;
  if (episodes > 1) {
    const double var = (sum_sq[t - 1][m] - n * out.mean * out.mean) / (n - 1.0);
    out.std = std::sqrt(std::max(0.0, var));
  }
  return out;
}

std::vector<double> EvalReport::costs() const {
  std::vector<double> out;
  for (const auto& e : episodes) out.push_back(e.total_cost);
  return out;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

EpisodeRecord run_episode(Agent& agent, Simulator& sim, std::uint64_t seed,
                          std::vector<StepOutcome>* steps) {
  sim.reset(seed);
  agent.begin_episode(sim);
  EpisodeRecord rec;
  rec.seed = seed;
  rec.digest = realization_digest(sim.scenario(), sim.realization());
  if (steps) steps->clear();
  while (!sim.done()) {
    StepOutcome out = sim.step(agent.act(sim));
    rec.costs += out.costs;
    rec.total_cost -= out.reward;
    if (steps) steps->push_back(std::move(out));
  }
  return rec;
}

namespace {

void finish(EvalReport& report) {
  const MeanStd ms = mean_std(report.costs());
  report.mean_cost = ms.mean;
  report.std_cost = ms.std;
  report.mean_costs = CostBreakdown{};
  for (const auto& e : report.episodes) report.mean_costs += e.costs;
  if (!report.episodes.empty())
    for (double& v : report.mean_costs.values) v /= static_cast<double>(report.episodes.size());
}

}  // namespace

EvalReport evaluate_agent(Agent& agent, const ScenarioSpec& scenario,
                          const std::vector<std::uint64_t>& seeds) {
  EvalReport report;
  report.agent = agent.name();
  Simulator sim(scenario);
  std::vector<StepOutcome> steps;
  for (std::uint64_t seed : seeds) {
    report.episodes.push_back(run_episode(agent, sim, seed, &steps));
    report.trace.add(steps);
  }
  finish(report);
  return report;
}

EvalReport pool_reports(const std::string& agent, const std::vector<EvalReport>& reports) {
  EvalReport pooled;
  pooled.agent = agent;
  for (const auto& r : reports) {
    pooled.episodes.insert(pooled.episodes.end(), r.episodes.begin(), r.episodes.end());
    pooled.trace.merge(r.trace);
  }
  finish(pooled);
  return pooled;
}

}  // namespace scplan
