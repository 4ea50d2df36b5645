#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "scplan/agent.hpp"
#include "scplan/evaluation.hpp"
#include "scplan/ppo.hpp"
#include "scplan/scenario.hpp"

namespace scplan {

/// Acts with the clipped mean action of a policy bundle.
class PpoAgent : public Agent {
 public:
  PpoAgent(const PolicyBundle& bundle, const ScenarioSpec& scenario);

  std::string name() const override { return "ppo"; }
  RawAction act(const Simulator& sim) override;

 private:
  const PolicyBundle* bundle_;
  std::vector<double> maxima_;
};

/// Fresh bundle sized for the scenario's observation and action vectors.
PolicyBundle make_policy(const ScenarioSpec& scenario, const PpoHyperparams& hp, std::uint64_t seed);

struct LearningRecord {
  std::uint64_t env_steps = 0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  bool is_best = false;
};

struct TrainOptions {
  std::uint64_t total_steps = 7'200'000;
  std::uint64_t eval_every = 18'000;
  int eval_episodes = 10;
  /// Written atomically whenever a new best evaluation is reached.
  std::string checkpoint_path;
  /// Called after every evaluation; returning false stops training.
  std::function<bool(const LearningRecord&)> on_evaluation;
};

struct TrainResult {
  PolicyBundle best;
  PolicyBundle last;
  std::vector<LearningRecord> curve;
  double best_cost = 0.0;
  bool diverged = false;
  bool stopped_early = false;
  std::string failure;
};

/// Episode seeds of the held-out environment used during training.
std::vector<std::uint64_t> training_eval_seeds(std::uint64_t seed, int episodes);

/// PPO with n_actors lockstep environments. Evaluations run at every
/// multiple of eval_every up to total_steps; the best bundle by mean
/// deterministic cost is kept. A non-finite loss aborts training with the
/// last good parameters.
TrainResult train(const ScenarioSpec& scenario, PolicyBundle bundle, const TrainOptions& options);

}  // namespace scplan
