#include "scplan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "scplan/checkpoint.hpp"
#include "scplan/codec.hpp"

namespace scplan {

PpoAgent::PpoAgent(const PolicyBundle& bundle, const ScenarioSpec& scenario)
    : bundle_(&bundle), maxima_(observation_maxima(scenario)) {
  if (bundle.obs_size() != scenario.chain.observation_size() ||
      bundle.action_size() != scenario.chain.action_size())
    throw ConfigError("policy does not match the scenario's chain");
}

RawAction PpoAgent::act(const Simulator& sim) {
  const auto obs = normalize_observation(sim.observation(), maxima_);
  return decode_action(policy_mode(*bundle_, obs).action, sim.state(), sim.chain());
}

PolicyBundle make_policy(const ScenarioSpec& scenario, const PpoHyperparams& hp, std::uint64_t seed) {
  return PolicyBundle::create(scenario.chain.observation_size(), scenario.chain.action_size(), hp, seed);
}

std::vector<std::uint64_t> training_eval_seeds(std::uint64_t seed, int episodes) {
  std::vector<std::uint64_t> out;
  const RngStream rng(seed);
  for (int e = 0; e < episodes; ++e)
    out.push_back(rng.derive(StreamPurpose::evaluation, static_cast<std::uint64_t>(e)));
  return out;
}

namespace {

struct ActorEnv {
  Simulator sim;
  std::vector<double> obs;  // normalized
  std::uint64_t episodes = 0;
  std::uint64_t steps = 0;
};

std::uint64_t episode_seed(std::uint64_t seed, int actor, std::uint64_t episode) {
  return RngStream(seed).derive(StreamPurpose::episode, static_cast<std::uint64_t>(actor), episode);
}

// Fisher-Yates on the (actor, update, epoch) substream.
std::vector<Eigen::Index> permutation(const RngStream& rng, std::uint64_t update, int epoch, Eigen::Index n) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const double u = rng.uniform(StreamPurpose::actor, 0xBA7C4ull + static_cast<std::uint64_t>(epoch), update,
                                 static_cast<std::uint64_t>(i));
    const auto j = std::min(static_cast<Eigen::Index>(u * static_cast<double>(i + 1)), i);
    std::swap(order[i], order[j]);
  }
  return order;
}

}  // namespace

TrainResult train(const ScenarioSpec& scenario, PolicyBundle bundle, const TrainOptions& options) {
  const PpoHyperparams& hp = bundle.hp;
  if (auto why = hp.check(); !why.empty()) throw std::invalid_argument(why);
  const ChainConfig& chain = scenario.chain;
  const auto maxima = observation_maxima(scenario);
  const int N = hp.n_actors;
  const int T = hp.n_steps;
  const int obs_size = bundle.obs_size();
  const int act_size = bundle.action_size();
  const RngStream rng(bundle.seed);
  if (static_cast<int>(bundle.normalizer.returns().size()) != N)
    bundle.normalizer = RewardNormalizer(N, hp.gamma);

  std::vector<ActorEnv> actors;
  for (int a = 0; a < N; ++a) {
    ActorEnv env{Simulator(scenario), {}, 0, bundle.env_steps / static_cast<std::uint64_t>(N)};
    env.obs = normalize_observation(env.sim.reset(episode_seed(bundle.seed, a, 0)), maxima);
    actors.push_back(std::move(env));
  }

  const auto eval_seeds = training_eval_seeds(bundle.seed, options.eval_episodes);
  const std::uint64_t eval_points = options.eval_every ? options.total_steps / options.eval_every : 0;
  std::uint64_t next_eval = 1;

  TrainResult result;
  result.best = bundle;
  result.best_cost = std::numeric_limits<double>::infinity();
  const auto evaluate = [&](std::uint64_t at_steps) {
    PpoAgent agent(bundle, scenario);
    const EvalReport report = evaluate_agent(agent, scenario, eval_seeds);
    LearningRecord rec{at_steps, report.mean_cost, report.std_cost, false};
    if (report.mean_cost < result.best_cost) {
      rec.is_best = true;
      result.best_cost = report.mean_cost;
      result.best = bundle;
      if (!options.checkpoint_path.empty()) save_checkpoint(bundle, options.checkpoint_path);
    }
    result.curve.push_back(rec);
    return !options.on_evaluation || options.on_evaluation(rec);
  };

  const Eigen::Index total = static_cast<Eigen::Index>(N) * T;
  Eigen::MatrixXd buf_obs(obs_size, total), buf_act(act_size, total);
  Eigen::VectorXd buf_logp(total), buf_adv(total), buf_ret(total);
  std::vector<std::vector<double>> rewards(N), values(N);
  std::vector<std::vector<bool>> dones(N);
  Eigen::MatrixXd batch_obs(obs_size, N);
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);

  bool keep_going = true;
  while (keep_going && bundle.env_steps < options.total_steps) {
    for (int a = 0; a < N; ++a) {
      rewards[a].clear();
      values[a].clear();
      dones[a].clear();
    }
    // Collect T steps from each actor in lockstep.
    const Eigen::ArrayXd std_dev = bundle.log_std.array().exp();
    const double log_std_sum = bundle.log_std.sum();
    for (int step = 0; step < T; ++step) {
      for (int a = 0; a < N; ++a)
        batch_obs.col(a) = Eigen::Map<const Eigen::VectorXd>(actors[a].obs.data(), obs_size);
      const Eigen::MatrixXd mean = bundle.actor.forward(batch_obs);
      const Eigen::MatrixXd value = bundle.critic.forward(batch_obs);
      for (int a = 0; a < N; ++a) {
        ActorEnv& env = actors[a];
        const Eigen::Index col = static_cast<Eigen::Index>(a) * T + step;
        Eigen::VectorXd noise(act_size);
        for (int i = 0; i < act_size; ++i)
          noise[i] = rng.normal(StreamPurpose::actor, static_cast<std::uint64_t>(a) + 1, env.steps,
                                static_cast<std::uint64_t>(i));
        const Eigen::VectorXd raw = mean.col(a) + (std_dev * noise.array()).matrix();
        std::vector<double> clipped(static_cast<std::size_t>(act_size));
        for (int i = 0; i < act_size; ++i) clipped[i] = std::clamp(raw[i], -1.0, 1.0);

        buf_obs.col(col) = batch_obs.col(a);
        buf_act.col(col) = raw;
        buf_logp[col] = -0.5 * noise.squaredNorm() - log_std_sum - act_size * log_norm;
        values[a].push_back(value(0, a));

        const StepOutcome out = env.sim.step(decode_action(clipped, env.sim.state(), chain));
        ++env.steps;
        rewards[a].push_back(bundle.normalizer.normalize(a, out.reward, out.done));
        dones[a].push_back(out.done);
        if (out.done) {
          ++env.episodes;
          env.obs = normalize_observation(env.sim.reset(episode_seed(bundle.seed, a, env.episodes)), maxima);
        } else {
          env.obs = normalize_observation(env.sim.observation(), maxima);
        }
      }
    }
    for (int a = 0; a < N; ++a)
      batch_obs.col(a) = Eigen::Map<const Eigen::VectorXd>(actors[a].obs.data(), obs_size);
    const Eigen::MatrixXd last_values = bundle.critic.forward(batch_obs);
    for (int a = 0; a < N; ++a) {
      const GaeResult gae = compute_gae(rewards[a], values[a], dones[a], last_values(0, a), hp.gamma, hp.gae_lambda);
      for (int step = 0; step < T; ++step) {
        buf_adv[static_cast<Eigen::Index>(a) * T + step] = gae.advantages[step];
        buf_ret[static_cast<Eigen::Index>(a) * T + step] = gae.returns[step];
      }
    }

    // K epochs of shuffled mini-batch updates.
    const double progress = static_cast<double>(bundle.env_steps) / static_cast<double>(options.total_steps);
    const double lr = hp.lr_schedule == LrSchedule::linear ? hp.learning_rate * (1.0 - progress) : hp.learning_rate;
    const Eigen::VectorXd before = bundle.flat_parameters();
    const AdamState optimizer_before = bundle.optimizer;
    try {
      Eigen::VectorXd flat = before;
      for (int epoch = 0; epoch < hp.n_epochs; ++epoch) {
        const auto order = permutation(rng, bundle.updates, epoch, total);
        for (Eigen::Index start = 0; start < total; start += hp.batch_size) {
          const Eigen::Index size = std::min<Eigen::Index>(hp.batch_size, total - start);
          Minibatch mb;
          mb.obs.resize(obs_size, size);
          mb.actions.resize(act_size, size);
          mb.old_log_prob.resize(size);
          mb.advantages.resize(size);
          mb.returns.resize(size);
          for (Eigen::Index k = 0; k < size; ++k) {
            const Eigen::Index idx = order[static_cast<std::size_t>(start + k)];
            mb.obs.col(k) = buf_obs.col(idx);
            mb.actions.col(k) = buf_act.col(idx);
            mb.old_log_prob[k] = buf_logp[idx];
            mb.advantages[k] = buf_adv[idx];
            mb.returns[k] = buf_ret[idx];
          }
          const LossTerms terms = ppo_loss(bundle, mb);
          adam_step(bundle.optimizer, flat, terms.gradient, lr, hp.max_grad_norm);
          bundle.set_flat_parameters(flat);
        }
      }
      if (!bundle.finite()) throw TrainingDivergence("parameters became non-finite");
    } catch (const TrainingDivergence& e) {
      bundle.set_flat_parameters(before);
      bundle.optimizer = optimizer_before;
      result.diverged = true;
      result.failure = e.what();
      break;
    }
    ++bundle.updates;
    bundle.env_steps += static_cast<std::uint64_t>(total);

    while (keep_going && next_eval <= eval_points && next_eval * options.eval_every <= bundle.env_steps) {
      keep_going = evaluate(next_eval * options.eval_every);
      ++next_eval;
    }
  }
  if (!keep_going) result.stopped_early = true;
  if (result.curve.empty()) evaluate(bundle.env_steps);
  result.last = std::move(bundle);
  return result;
}

}  // namespace scplan
