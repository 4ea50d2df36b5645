#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "scplan/agent.hpp"
#include "scplan/scenario.hpp"
#include "scplan/simulator.hpp"

namespace scplan {

/// Episode set shared by every agent: episodes_per_seed episodes per seed,
/// each with its own derived episode seed.
struct EvalPlan {
  std::vector<std::uint64_t> seeds;
  int episodes_per_seed = 10;
};

/// Ten fixed seeds, ten episodes each.
EvalPlan default_eval_plan();
std::vector<std::uint64_t> episode_seeds(const EvalPlan& plan);

/// Hash of an episode's demands and lead times; equal digests mean the same
/// realization.
std::uint64_t realization_digest(const ScenarioSpec& scenario, const EpisodeRealization& realization);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  CostBreakdown costs;
  std::uint64_t digest = 0;
};

enum class TraceMetric { stock, production, transport, unmet, demand, discarded };
inline constexpr int kNumTraceMetrics = 6;
const char* trace_metric_name(TraceMetric m);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Chain-wide totals per step, accumulated over episodes.
struct TraceAggregate {
  int episodes = 0;
  std::vector<std::array<double, kNumTraceMetrics>> sum;     // [t - 1]
  std::vector<std::array<double, kNumTraceMetrics>> sum_sq;  // [t - 1]

  void add(const std::vector<StepOutcome>& steps);
  void merge(const TraceAggregate& other);
  int horizon() const { return static_cast<int>(sum.size()); }
  /// Mean and sample standard deviation at step t (1-based).
  MeanStd stats(int t, TraceMetric metric) const;
};

struct EvalReport {
  std::string agent;
  std::vector<EpisodeRecord> episodes;
  double mean_cost = 0.0;
  double std_cost = 0.0;  // sample standard deviation
  CostBreakdown mean_costs;
  TraceAggregate trace;

  std::vector<double> costs() const;
};

/// One full episode; `steps`, when given, receives every step outcome.
EpisodeRecord run_episode(Agent& agent, Simulator& sim, std::uint64_t seed,
                          std::vector<StepOutcome>* steps = nullptr);

/// Runs the agent on every episode seed, in order.
EvalReport evaluate_agent(Agent& agent, const ScenarioSpec& scenario,
                          const std::vector<std::uint64_t>& episode_seeds);

/// Concatenates episodes and merges traces, e.g. over several trained models.
EvalReport pool_reports(const std::string& agent, const std::vector<EvalReport>& reports);

MeanStd mean_std(const std::vector<double>& values);

}  // namespace scplan
