#include "scplan/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace scplan {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string header(const std::string& kind, const std::string& columns) {
  return "# scplan-" + kind + " v" + std::to_string(kCsvSchemaVersion) + ": " + columns + "\n" + columns + "\n";
}

std::string cost_columns() {
  std::string out;
  for (int c = 0; c < kNumCostTypes; ++c) {
    out += ',';
    out += cost_type_name(static_cast<CostType>(c));
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Data rows after the version comment and the header row.
std::vector<std::vector<std::string>> data_rows(const std::string& text, const std::string& kind,
                                                std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# scplan-" + kind + " v", 0) != 0)
    throw std::runtime_error("not a " + kind + " export");
  const auto version = std::stoi(line.substr(11 + kind.size()));
  if (version != kCsvSchemaVersion) throw std::runtime_error("unsupported " + kind + " schema version");
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) throw std::runtime_error("malformed " + kind + " row: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string learning_curve_csv(const std::vector<LearningRecord>& curve) {
  std::string out = header("learning-curve", "env_steps,eval_mean_cost,eval_std_cost,is_best");
  for (const auto& r : curve)
    out += std::to_string(r.env_steps) + ',' + num(r.mean_cost) + ',' + num(r.std_cost) + ',' +
           (r.is_best ? "1" : "0") + '\n';
  return out;
}

std::vector<LearningRecord> parse_learning_curve_csv(const std::string& text) {
  std::vector<LearningRecord> out;
  for (const auto& c : data_rows(text, "learning-curve", 4))
    out.push_back({std::stoull(c[0]), std::stod(c[1]), std::stod(c[2]), c[3] == "1"});
  return out;
}

std::string evaluation_csv(const std::vector<EvalReport>& reports) {
  std::string out = header("evaluation", "episode_id,agent,total_cost" + cost_columns() + ",episode_seed");
  for (const auto& r : reports)
    for (std::size_t e = 0; e < r.episodes.size(); ++e) {
      const EpisodeRecord& ep = r.episodes[e];
      out += std::to_string(e) + ',' + r.agent + ',' + num(ep.total_cost);
      for (double v : ep.costs.values) out += ',' + num(v);
      out += ',' + std::to_string(ep.seed) + '\n';
    }
  return out;
}

std::vector<EvalReport> parse_evaluation_csv(const std::string& text) {
  std::vector<EvalReport> out;
  for (const auto& c : data_rows(text, "evaluation", 4 + kNumCostTypes)) {
    if (out.empty() || out.back().agent != c[1]) {
      out.emplace_back();
      out.back().agent = c[1];
    }
    EpisodeRecord rec;
    rec.total_cost = std::stod(c[2]);
    for (int k = 0; k < kNumCostTypes; ++k) rec.costs.values[k] = std::stod(c[3 + k]);
    rec.seed = std::stoull(c[3 + kNumCostTypes]);
    out.back().episodes.push_back(rec);
  }
  for (auto& r : out) {
    const MeanStd ms = mean_std(r.costs());
    r.mean_cost = ms.mean;
    r.std_cost = ms.std;
    for (const auto& e : r.episodes) r.mean_costs += e.costs;
    for (double& v : r.mean_costs.values) v /= static_cast<double>(r.episodes.size());
  }
  return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = header("comparison",
                           "scenario,episodes,bound_mean,bound_std,lp_mean,lp_std,ppo_mean,ppo_std,"
                           "gain,gain_percent,lp_ci_low,lp_ci_high,ppo_ci_low,ppo_ci_high");
  for (const auto& r : rows) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f", r.gain.percent);
    out += r.scenario + ',' + std::to_string(r.episodes) + ',' + num(r.bound.mean) + ',' + num(r.bound.std) + ',' +
           num(r.lp.mean) + ',' + num(r.lp.std) + ',' + num(r.ppo.mean) + ',' + num(r.ppo.std) + ',' +
           num(r.gain.value) + ',' + pct + ',' + num(r.lp_ci.low) + ',' + num(r.lp_ci.high) + ',' +
           num(r.ppo_ci.low) + ',' + num(r.ppo_ci.high) + '\n';
  }
  return out;
}

std::string trace_csv(const std::vector<EvalReport>& reports) {
  std::string columns = "agent,step";
  for (int m = 0; m < kNumTraceMetrics; ++m) {
    const std::string name = trace_metric_name(static_cast<TraceMetric>(m));
    columns += ',' + name + "_mean," + name + "_std";
  }
  std::string out = header("trace", columns);
  for (const auto& r : reports)
    for (int t = 1; t <= r.trace.horizon(); ++t) {
      out += r.agent + ',' + std::to_string(t);
      for (int m = 0; m < kNumTraceMetrics; ++m) {
        const MeanStd s = r.trace.stats(t, static_cast<TraceMetric>(m));
        out += ',' + num(s.mean) + ',' + num(s.std);
      }
      out += '\n';
    }
  return out;
}

std::string episode_trace_csv(const ChainConfig& chain, const std::vector<StepOutcome>& steps) {
  std::string out = header("episode-trace",
                           "step,node,stock,arrived,shipped,produced,demand,unmet,discarded" + cost_columns() + ",reward");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepFlows& f = steps[i].flows;
    for (int n = 0; n < chain.num_nodes(); ++n) {
      const auto k = static_cast<std::size_t>(n);
      out += std::to_string(i + 1) + ',' + chain.node_names[k] + ',' + num(f.stock_after[k]) + ',' + num(f.arrived[k]) +
             ',' + num(f.shipped[k]) + ',' + num(f.produced[k]) + ',' + num(f.demand[k]) + ',' + num(f.unmet[k]) + ',' +
             num(f.discarded[k]);
      for (double v : f.node_costs[k].values) out += ',' + num(v);
      out += ',' + num(-f.node_costs[k].total()) + '\n';
    }
  }
  return out;
}

std::string demand_trace_csv(const ChainConfig& chain, const EpisodeRealization& realization) {
  std::string out = header("demand-trace", "step,retailer,demand");
  const auto retailers = chain.retailers();
  for (int t = 1; t <= chain.horizon; ++t)
    for (std::size_t k = 0; k < retailers.size(); ++k)
      out += std::to_string(t) + ',' + chain.node_names[retailers[k]] + ',' +
             num(realization.demand(static_cast<int>(k), t)) + '\n';
  return out;
}

std::string plan_csv(const ChainConfig& chain, const LpPlan& plan) {
  std::string out = header("plan", "step,node,quantity,kind");
  const auto suppliers = chain.suppliers();
  for (int t = 1; t <= plan.horizon; ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    for (std::size_t s = 0; s < suppliers.size(); ++s)
      out += std::to_string(t) + ',' + chain.node_names[suppliers[s]] + ',' + num(plan.production[i][s]) +
             ",production\n";
    for (int l = 0; l < chain.num_links(); ++l) {
      const Link& link = chain.links[l];
      out += std::to_string(t) + ',' + chain.node_names[link.source] + '>' + chain.node_names[link.dest] + ',' +
             num(plan.shipments[i][l]) + ",shipment\n";
    }
    for (int n = 0; n < chain.num_nodes(); ++n)
      out += std::to_string(t) + ',' + chain.node_names[n] + ',' + num(plan.stocks[i][n]) + ",stock\n";
  }
  return out;
}

std::string bounds_csv(const std::vector<std::uint64_t>& seeds, const std::vector<double>& bounds) {
  if (seeds.size() != bounds.size()) throw std::invalid_argument("one bound per episode seed expected");
  std::string out = header("bounds", "episode_id,episode_seed,bound");
  for (std::size_t e = 0; e < seeds.size(); ++e)
    out += std::to_string(e) + ',' + std::to_string(seeds[e]) + ',' + num(bounds[e]) + '\n';
  return out;
}

}  // namespace scplan
