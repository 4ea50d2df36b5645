#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scplan/evaluation.hpp"
#include "scplan/lp_agent.hpp"
#include "scplan/ppo.hpp"
#include "scplan/scenario.hpp"
#include "scplan/statistics.hpp"
#include "scplan/trainer.hpp"

namespace scplan {

/// Five fixed training seeds.
std::vector<std::uint64_t> default_training_seeds();

struct CampaignSpec {
  ScenarioSpec scenario;
  std::vector<std::uint64_t> training_seeds = default_training_seeds();
  std::uint64_t total_steps = 7'200'000;
  std::uint64_t eval_every = 18'000;
  int eval_episodes = 10;
  EvalPlan final_plan = default_eval_plan();
  PpoHyperparams hp;
  /// Also solve the LP baseline and the per-episode perfect-information bounds.
  bool with_baselines = true;
  /// Concurrent trainings; each one is independent.
  int workers = 1;
  /// Checkpoints, curves and reports go here when set.
  std::string out_dir;

  /// Empty when usable, otherwise the first violated invariant.
  std::string check() const;
};

enum class Preset { desk, paper };
Preset parse_preset(const std::string& name);

/// paper: five seeds at 7.2M steps; desk: the first seed at 500k steps.
CampaignSpec campaign_preset(Preset preset, const ScenarioSpec& scenario);

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<LearningRecord> curve;
  double best_training_cost = 0.0;
  std::string failure;  // empty when training finished normally
  std::string checkpoint_path;
  std::optional<EvalReport> report;
};

struct CampaignRecord {
  std::string scenario;
  std::vector<SeedRun> runs;
  std::optional<EvalReport> ppo;  // pooled over every trained model
  std::optional<EvalReport> lp;
  std::vector<double> bounds;  // one per final-evaluation episode
  std::optional<ComparisonRow> comparison;
  std::string lp_failure;
};

/// Trains one bundle per seed, evaluates each best bundle on the shared
/// episode set and assembles the reports. A failing seed is recorded and
/// the campaign continues.
CampaignRecord run_campaign(const CampaignSpec& spec);

/// Writes evaluation, trace, comparison and bounds CSVs for a finished
/// campaign into `dir`.
void write_campaign_reports(const CampaignRecord& record, const std::string& dir);

}  // namespace scplan
