#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scplan/ppo.hpp"
#include "scplan/scenario.hpp"

namespace scplan {

/// Trial `index` of the random search; trial 0 is the shipped defaults.
/// Fixed: n_actors = 4, ent_coef = 0.
PpoHyperparams sample_hyperparams(std::uint64_t seed, int index);

struct TuneOptions {
  int trials = 100;
  std::uint64_t steps_per_trial = 3'600'000;
  std::uint64_t eval_every = 18'000;
  int eval_episodes = 10;
  std::uint64_t seed = 7;
};

struct TrialRecord {
  int index = 0;
  PpoHyperparams hp;
  /// Best evaluation cost so far, after each evaluation.
  std::vector<double> running_best;
  double best_cost = 0.0;
  bool pruned = false;
  std::string failure;  // non-empty for a failed trial
};

struct TuneResult {
  std::vector<TrialRecord> trials;
  int best_index = -1;
  PpoHyperparams best;
};

/// Median rule: a trial stops at evaluation j when its running best there is
/// worse than the median of earlier trials' running bests at j.
bool should_prune(double running_best, const std::vector<double>& earlier_at_checkpoint);

TuneResult random_search_tune(const ScenarioSpec& scenario, const TuneOptions& options);

}  // namespace scplan
