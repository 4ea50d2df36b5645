#include "scplan/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scplan/stochastic.hpp"
#include "scplan/trainer.hpp"

namespace scplan {

namespace {

template <typename T>
T pick(const RngStream& rng, std::uint64_t trial, std::uint64_t field, const std::vector<T>& values) {
  const double u = rng.uniform(StreamPurpose::tuning, trial, field);
  return values[std::min(static_cast<std::size_t>(u * static_cast<double>(values.size())), values.size() - 1)];
}

}  // namespace

PpoHyperparams sample_hyperparams(std::uint64_t seed, int index) {
  PpoHyperparams hp;
  if (index == 0) return hp;
  const RngStream rng(seed);
  const auto t = static_cast<std::uint64_t>(index);
  hp.n_steps = pick<int>(rng, t, 0, {32, 64, 128, 256, 512, 1024, 2048});
  hp.n_epochs = pick<int>(rng, t, 1, {3, 5, 10, 20});
  hp.batch_size = pick<int>(rng, t, 2, {64, 128, 256, 512});
  hp.vf_coef = rng.uniform(StreamPurpose::tuning, t, 3);
  hp.clip_range = pick<double>(rng, t, 4, {0.1, 0.2, 0.3});
  hp.gae_lambda = pick<double>(rng, t, 5, {0.9, 0.92, 0.95, 0.98, 1.0});
  hp.gamma = pick<double>(rng, t, 6, {0.95, 0.98, 0.99, 0.995, 0.999, 0.9999});
  hp.hidden = pick<std::vector<int>>(rng, t, 7, {{64, 64}, {128, 128}, {256, 256}});
  hp.lr_schedule = pick<LrSchedule>(rng, t, 8, {LrSchedule::constant, LrSchedule::linear});
  hp.learning_rate = std::pow(10.0, -5.0 + 3.0 * rng.uniform(StreamPurpose::tuning, t, 9));
  hp.activation = pick<Activation>(rng, t, 10, {Activation::relu, Activation::tanh});
  hp.max_grad_norm = pick<double>(rng, t, 11, {0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 5.0});
  hp.n_actors = 4;
  hp.ent_coef = 0.0;
  return hp;
}

bool should_prune(double running_best, const std::vector<double>& earlier) {
  if (earlier.empty()) return false;
  std::vector<double> v = earlier;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double median = *mid;
  if (v.size() % 2 == 0) median = 0.5 * (median + *std::max_element(v.begin(), mid));
  return running_best > median;
}

TuneResult random_search_tune(const ScenarioSpec& scenario, const TuneOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("at least one trial is required");
  TuneResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < options.trials; ++i) {
    TrialRecord trial;
    trial.index = i;
    trial.hp = sample_hyperparams(options.seed, i);
    trial.best_cost = std::numeric_limits<double>::infinity();
    TrainOptions opt;
    opt.total_steps = options.steps_per_trial;
    opt.eval_every = options.eval_every;
    opt.eval_episodes = options.eval_episodes;
    opt.on_evaluation = [&](const LearningRecord& rec) {
      trial.best_cost = std::min(trial.best_cost, rec.mean_cost);
      trial.running_best.push_back(trial.best_cost);
      const std::size_t j = trial.running_best.size() - 1;
      std::vector<double> earlier;
      for (const auto& prev : result.trials)
        if (prev.failure.empty() && prev.running_best.size() > j) earlier.push_back(prev.running_best[j]);
      if (should_prune(trial.best_cost, earlier)) trial.pruned = true;
      return !trial.pruned;
    };
    try {
      const TrainResult tr = train(scenario, make_policy(scenario, trial.hp, options.seed + static_cast<std::uint64_t>(i)), opt);
      if (tr.diverged) trial.failure = "training diverged: " + tr.failure;
    } catch (const std::exception& e) {
      trial.failure = e.what();
    }
    if (trial.failure.empty() && trial.best_cost < best) {
      best = trial.best_cost;
      result.best_index = i;
    }
    result.trials.push_back(std::move(trial));
  }
  result.best = result.best_index >= 0 ? result.trials[static_cast<std::size_t>(result.best_index)].hp : PpoHyperparams{};
  return result;
}

}  // namespace scplan
