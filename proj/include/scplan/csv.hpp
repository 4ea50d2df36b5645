#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scplan/evaluation.hpp"
#include "scplan/lp_agent.hpp"
#include "scplan/statistics.hpp"
#include "scplan/trainer.hpp"

namespace scplan {

/// Every export starts with "# scplan-<kind> v<version>: <columns>" and then
/// a plain header row.
inline constexpr int kCsvSchemaVersion = 1;

std::string learning_curve_csv(const std::vector<LearningRecord>& curve);

/// episode_id, agent, total_cost, one column per cost type, episode_seed.
std::string evaluation_csv(const std::vector<EvalReport>& reports);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);

/// Mean and standard deviation of each chain-wide metric, per agent and step.
std::string trace_csv(const std::vector<EvalReport>& reports);

/// One row per step and node of a single episode, with the node's costs.
std::string episode_trace_csv(const ChainConfig& chain, const std::vector<StepOutcome>& steps);

/// step, retailer, demand.
std::string demand_trace_csv(const ChainConfig& chain, const EpisodeRealization& realization);

/// step, node, quantity, kind; kind is production, shipment or stock.
std::string plan_csv(const ChainConfig& chain, const LpPlan& plan);

/// episode_id, episode_seed, bound.
std::string bounds_csv(const std::vector<std::uint64_t>& seeds, const std::vector<double>& bounds);

/// Reads a learning-curve export back; throws std::runtime_error on bad input.
std::vector<LearningRecord> parse_learning_curve_csv(const std::string& text);

/// Reads an evaluation export back, grouping rows by agent in order of
/// appearance. Only per-episode costs are restored.
std::vector<EvalReport> parse_evaluation_csv(const std::string& text);

}  // namespace scplan
