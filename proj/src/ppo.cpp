#include "scplan/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scplan/stochastic.hpp"

namespace scplan {

namespace {

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string PpoHyperparams::check() const {
  if (n_steps < 1) return "n_steps must be positive";
  if (n_epochs < 1) return "n_epochs must be positive";
  if (batch_size < 1) return "batch_size must be positive";
  if (!(clip_range > 0.0)) return "clip_range must be positive";
  if (!(gamma > 0.0 && gamma <= 1.0)) return "gamma must lie in (0, 1]";
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) return "gae_lambda must lie in [0, 1]";
  if (!(learning_rate > 0.0)) return "learning_rate must be positive";
  if (!(max_grad_norm > 0.0)) return "max_grad_norm must be positive";
  if (vf_coef < 0.0 || ent_coef < 0.0) return "loss coefficients must be non-negative";
  if (n_actors < 1) return "n_actors must be positive";
  if (hidden.empty()) return "at least one hidden layer is required";
  for (int h : hidden)
    if (h < 1) return "hidden layer sizes must be positive";
  return {};
}

double adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, Eigen::VectorXd grad,
                 double lr, double max_grad_norm) {
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
  }
  const double norm = grad.norm();
  if (norm > max_grad_norm) grad *= max_grad_norm / norm;
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
  return norm;
}

PolicyBundle PolicyBundle::create(int obs_size, int action_size, const PpoHyperparams& hp,
                                  std::uint64_t seed) {
  if (auto why = hp.check(); !why.empty()) throw std::invalid_argument(why);
  PolicyBundle b;
  b.hp = hp;
  b.seed = seed;
  std::vector<int> actor_sizes{obs_size};
  actor_sizes.insert(actor_sizes.end(), hp.hidden.begin(), hp.hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(action_size);
  critic_sizes.push_back(1);
  b.actor = Mlp(actor_sizes, hp.activation);
  b.critic = Mlp(critic_sizes, hp.activation);
  const RngStream rng(seed);
  b.actor.initialize(rng.derive(StreamPurpose::actor, 1), 0.01);
  b.critic.initialize(rng.derive(StreamPurpose::actor, 2), 1.0);
  b.log_std = Eigen::VectorXd::Zero(action_size);
  b.normalizer = RewardNormalizer(hp.n_actors, hp.gamma);
  return b;
}

Eigen::Index PolicyBundle::num_parameters() const {
  return actor.num_parameters() + log_std.size() + critic.num_parameters();
}

Eigen::VectorXd PolicyBundle::flat_parameters() const {
  Eigen::VectorXd flat(num_parameters());
  flat << actor.parameters(), log_std, critic.parameters();
  return flat;
}

void PolicyBundle::set_flat_parameters(const Eigen::VectorXd& flat) {
  if (flat.size() != num_parameters()) throw std::invalid_argument("parameter vector has the wrong size");
  const Eigen::Index na = actor.num_parameters();
  actor.parameters() = flat.head(na);
  log_std = flat.segment(na, log_std.size());
  critic.parameters() = flat.tail(critic.num_parameters());
}

bool PolicyBundle::finite() const {
  return actor.parameters().allFinite() && log_std.allFinite() && critic.parameters().allFinite();
}

PolicyOutput policy_forward(const PolicyBundle& bundle, const std::vector<double>& obs) {
  if (!bundle.finite()) throw TrainingDivergence("policy bundle holds non-finite parameters");
  const Eigen::VectorXd x = to_vector(obs);
  PolicyOutput out;
  out.mean = bundle.actor.forward(x).col(0);
  out.log_std = bundle.log_std;
  out.value = bundle.critic.forward(x)(0, 0);
  return out;
}

double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std) {
  const Eigen::ArrayXd z = (x - mean).array() / log_std.array().exp();
  return (-0.5 * z.square() - log_std.array() - kLogSqrt2Pi).sum();
}

PolicySample policy_sample(const PolicyBundle& bundle, const std::vector<double>& obs,
                           const std::vector<double>& noise) {
  const PolicyOutput out = policy_forward(bundle, obs);
  if (static_cast<Eigen::Index>(noise.size()) != out.mean.size())
    throw std::invalid_argument("noise has the wrong size");
  const Eigen::VectorXd raw = out.mean + (out.log_std.array().exp() * to_vector(noise).array()).matrix();
  PolicySample s;
  s.raw.assign(raw.data(), raw.data() + raw.size());
  s.action.resize(s.raw.size());
  for (std::size_t i = 0; i < s.raw.size(); ++i) s.action[i] = std::clamp(s.raw[i], -1.0, 1.0);
  s.log_prob = gaussian_log_prob(raw, out.mean, out.log_std);
  s.value = out.value;
  return s;
}

PolicySample policy_mode(const PolicyBundle& bundle, const std::vector<double>& obs) {
  return policy_sample(bundle, obs, std::vector<double>(static_cast<std::size_t>(bundle.action_size()), 0.0));
}

GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& done, double last_value, double gamma,
                      double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || done.size() != n)
    throw std::invalid_argument("rewards, values and done flags differ in length");
  GaeResult r;
  r.advantages.assign(n, 0.0);
  r.returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = i + 1 < n ? values[i + 1] : last_value;
    const double live = done[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * live - values[i];
    next_adv = delta + gamma * lambda * live * next_adv;
    r.advantages[i] = next_adv;
    r.returns[i] = next_adv + values[i];
  }
  return r;
}

double clipped_surrogate(double ratio, double advantage, double clip_range) {
  return std::min(ratio * advantage,
                  std::clamp(ratio, 1.0 - clip_range, 1.0 + clip_range) * advantage);
}

LossTerms ppo_loss(const PolicyBundle& bundle, const Minibatch& batch) {
  const Eigen::Index B = batch.obs.cols();
  const Eigen::Index A = bundle.action_size();
  const double eps = bundle.hp.clip_range;
  if (B == 0) throw std::invalid_argument("empty mini-batch");

  Eigen::VectorXd adv = batch.advantages;
  if (bundle.hp.normalize_advantage && B > 1) {
    const double mean = adv.mean();
    const double sd = std::sqrt((adv.array() - mean).square().sum() / static_cast<double>(B - 1));
    adv = (adv.array() - mean) / (sd + 1e-8);
  }

  Mlp::Cache actor_cache, critic_cache;
  const Eigen::MatrixXd mean = bundle.actor.forward(batch.obs, &actor_cache);
  const Eigen::RowVectorXd value = bundle.critic.forward(batch.obs, &critic_cache).row(0);
  const Eigen::ArrayXd inv_std = (-bundle.log_std.array()).exp();
  // z = (a - mean) / std, per action dimension and sample.
  const Eigen::ArrayXXd z = (batch.actions - mean).array().colwise() * inv_std;
  const Eigen::RowVectorXd log_prob =
      (-0.5 * z.square()).colwise().sum().matrix() -
      Eigen::RowVectorXd::Constant(B, bundle.log_std.sum() + static_cast<double>(A) * kLogSqrt2Pi);

  LossTerms out;
  out.gradient = Eigen::VectorXd::Zero(bundle.num_parameters());
  Eigen::RowVectorXd dlogp(B);  // d loss / d log_prob per sample
  double surrogate = 0.0;
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < B; ++i) {
    const double ratio = std::exp(log_prob[i] - batch.old_log_prob[i]);
    const double unclipped_term = ratio * adv[i];
    const double clipped_term = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv[i];
    surrogate += std::min(unclipped_term, clipped_term);
    if (std::abs(ratio - 1.0) > eps) clipped += 1.0;
    const double d_ratio = unclipped_term <= clipped_term ? adv[i] : 0.0;
    dlogp[i] = -d_ratio * ratio / static_cast<double>(B);
  }
  out.policy_objective = surrogate / static_cast<double>(B);
  out.clip_fraction = clipped / static_cast<double>(B);
  const Eigen::RowVectorXd verr = value - batch.returns.transpose();
  out.value_loss = verr.squaredNorm() / static_cast<double>(B);
  out.entropy = (bundle.log_std.array() + 0.5 + kLogSqrt2Pi).sum();
  out.loss = -out.policy_objective + bundle.hp.vf_coef * out.value_loss - bundle.hp.ent_coef * out.entropy;
  if (!std::isfinite(out.loss)) throw TrainingDivergence("non-finite PPO loss");

  // d log_prob / d mean = z / std; d log_prob / d log_std = z^2 - 1.
  const Eigen::MatrixXd grad_mean =
      ((z.colwise() * inv_std).rowwise() * dlogp.array()).matrix();
  const Eigen::Index na = bundle.actor.num_parameters();
  bundle.actor.backward(actor_cache, grad_mean, out.gradient.head(na));
  out.gradient.segment(na, A) =
      ((z.square() - 1.0).rowwise() * dlogp.array()).rowwise().sum().matrix();
  out.gradient.segment(na, A).array() -= bundle.hp.ent_coef;
  const Eigen::MatrixXd grad_value = (2.0 * bundle.hp.vf_coef / static_cast<double>(B)) * verr;
  bundle.critic.backward(critic_cache, grad_value, out.gradient.tail(bundle.critic.num_parameters()));
  return out;
}

}  // namespace scplan
