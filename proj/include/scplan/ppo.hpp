#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "scplan/network.hpp"
#include "scplan/reward_normalizer.hpp"

namespace scplan {

/// Non-finite parameters or a non-finite loss.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LrSchedule { constant, linear };

struct PpoHyperparams {
  int n_steps = 1024;
  int n_epochs = 20;
  int batch_size = 64;
  double vf_coef = 0.88331;
  double clip_range = 0.2;
  double gae_lambda = 0.95;
  double gamma = 0.999;
  std::vector<int> hidden = {64, 64};
  LrSchedule lr_schedule = LrSchedule::constant;
  double learning_rate = 1e-4;
  Activation activation = Activation::tanh;
  double max_grad_norm = 0.5;
  int n_actors = 4;
  double ent_coef = 0.0;
  bool normalize_advantage = true;

  /// Empty when usable, otherwise the first violated bound.
  std::string check() const;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Scales `grad` to global norm max_grad_norm when it is larger, then takes
/// one bias-corrected Adam step. Returns the pre-clipping norm.
double adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params, Eigen::VectorXd grad,
                 double lr, double max_grad_norm);

/// Gaussian actor with a state-independent log-std vector and a value
/// critic, plus everything needed to resume training.
struct PolicyBundle {
  PpoHyperparams hp;
  Mlp actor;
  Eigen::VectorXd log_std;
  Mlp critic;
  AdamState optimizer;
  RewardNormalizer normalizer;
  std::uint64_t seed = 0;
  std::uint64_t env_steps = 0;
  std::uint64_t updates = 0;

  static PolicyBundle create(int obs_size, int action_size, const PpoHyperparams& hp,
                             std::uint64_t seed);

  int obs_size() const { return actor.input_size(); }
  int action_size() const { return actor.output_size(); }
  /// actor parameters, then log_std, then critic parameters.
  Eigen::VectorXd flat_parameters() const;
  void set_flat_parameters(const Eigen::VectorXd& flat);
  Eigen::Index num_parameters() const;
  bool finite() const;
};

struct PolicyOutput {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
  double value = 0.0;
};

/// Throws TrainingDivergence when the bundle holds non-finite parameters.
PolicyOutput policy_forward(const PolicyBundle& bundle, const std::vector<double>& obs);

struct PolicySample {
  std::vector<double> action;  // clipped to [-1, 1]
  std::vector<double> raw;     // pre-clip sample
  double log_prob = 0.0;       // density of the pre-clip sample
  double value = 0.0;
};

/// mean + exp(log_std) * noise; zero noise gives the deterministic action.
PolicySample policy_sample(const PolicyBundle& bundle, const std::vector<double>& obs,
                           const std::vector<double>& noise);
/// Deterministic mode: the clipped mean, no randomness involved.
PolicySample policy_mode(const PolicyBundle& bundle, const std::vector<double>& obs);

/// Diagonal Gaussian log-density.
double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Backward recursion over one actor's contiguous transitions. done[t] marks
/// a true terminal after transition t; `last_value` bootstraps the final
/// transition when it is not terminal.
GaeResult compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                      const std::vector<bool>& done, double last_value, double gamma,
                      double lambda);

/// Columns are samples.
struct Minibatch {
  Eigen::MatrixXd obs;
  Eigen::MatrixXd actions;  // pre-clip samples
  Eigen::VectorXd old_log_prob;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
};

struct LossTerms {
  double loss = 0.0;
  double policy_objective = 0.0;  // clipped surrogate, to be maximized
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  Eigen::VectorXd gradient;  // layout of PolicyBundle::flat_parameters
};

/// -L_clip + vf_coef * L_vf - ent_coef * S with its exact gradient.
LossTerms ppo_loss(const PolicyBundle& bundle, const Minibatch& batch);

/// Clipped surrogate of one sample.
double clipped_surrogate(double ratio, double advantage, double clip_range);

}  // namespace scplan
