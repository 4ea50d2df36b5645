#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "scplan/checkpoint.hpp"
#include "scplan/ppo.hpp"

using namespace scplan;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937& gen, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(gen);
  return m;
}


PpoHyperparams small_hp() {
  PpoHyperparams hp;
  hp.hidden = {4, 4};
  return hp;
}

Minibatch random_batch(const PolicyBundle& b, int size, std::mt19937& gen) {
  Minibatch m;
  m.obs = random_matrix(b.obs_size(), size, gen);
  const Eigen::MatrixXd mean = b.actor.forward(m.obs);
  m.actions = mean + random_matrix(b.action_size(), size, gen, 0.5);
  m.old_log_prob.resize(size);
  std::uniform_real_distribution<double> shift(-0.1, 0.1);
  for (int i = 0; i < size; ++i)
    m.old_log_prob[i] = gaussian_log_prob(m.actions.col(i), mean.col(i), b.log_std) + shift(gen);
  m.advantages = random_matrix(size, 1, gen, 2.0);
  m.returns = random_matrix(size, 1, gen, 3.0);
  return m;
}

}  // namespace

TEST(Network, ForwardMatchesExplicitLoops) {
  Mlp net({3, 5, 2}, Activation::tanh);
  net.initialize(4, 1.0);
  std::mt19937 gen(2);
  net.parameters() = random_matrix(net.num_parameters(), 1, gen, 0.5);
  const Eigen::MatrixXd x = random_matrix(3, 4, gen);
  const Eigen::MatrixXd y = net.forward(x);
  const double* p = net.parameters().data();
  for (int s = 0; s < 4; ++s) {
    double hidden[5];
    for (int o = 0; o < 5; ++o) {
      double acc = p[15 + o];
      for (int i = 0; i < 3; ++i) acc += p[i * 5 + o] * x(i, s);
      hidden[o] = std::tanh(acc);
    }
    for (int o = 0; o < 2; ++o) {
      double acc = p[20 + 10 + o];
      for (int i = 0; i < 5; ++i) acc += p[20 + i * 2 + o] * hidden[i];
      EXPECT_NEAR(y(o, s), acc, 1e-12);
    }
  }
}

TEST(Network, OrthogonalInitialization) {
  Mlp net({27, 64, 64, 14}, Activation::tanh);
  net.initialize(9, 0.01);
  const Eigen::Map<const Eigen::MatrixXd> w0(net.parameters().data(), 64, 27);
  // Columns orthogonal with norm sqrt(2).
  const Eigen::MatrixXd gram = w0.transpose() * w0;
  EXPECT_LT((gram - 2.0 * Eigen::MatrixXd::Identity(27, 27)).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::Index offset = 64 * 27 + 64;
  EXPECT_EQ(net.parameters().segment(64 * 27, 64).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::Map<const Eigen::MatrixXd> w1(net.parameters().data() + offset, 64, 64);
  EXPECT_LT((w1.transpose() * w1 - 2.0 * Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-10);
  Mlp again({27, 64, 64, 14}, Activation::tanh);
  again.initialize(9, 0.01);
  EXPECT_EQ(again.parameters(), net.parameters());
}

TEST(Network, BackwardMatchesFiniteDifferences) {
  for (Activation act : {Activation::tanh, Activation::relu}) {
    Mlp net({4, 4, 4, 3}, act);
    net.initialize(1, 1.0);
    std::mt19937 gen(5);
    net.parameters() += random_matrix(net.num_parameters(), 1, gen, 0.1);
    const Eigen::MatrixXd x = random_matrix(4, 6, gen);
    const Eigen::MatrixXd target = random_matrix(3, 6, gen);
    const auto loss = [&](const Mlp& m) { return 0.5 * (m.forward(x) - target).squaredNorm(); };
    Mlp::Cache cache;
    const Eigen::MatrixXd out = net.forward(x, &cache);
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(net.num_parameters());
    net.backward(cache, out - target, grad);
    for (Eigen::Index k = 0; k < net.num_parameters(); ++k) {
      const double h = 1e-6;
      Mlp plus = net, minus = net;
      plus.parameters()[k] += h;
      minus.parameters()[k] -= h;
      const double fd = (loss(plus) - loss(minus)) / (2 * h);
      EXPECT_LE(std::abs(fd - grad[k]), 1e-4 * std::max(1.0, std::abs(grad[k]))) << activation_name(act) << " " << k;
    }
  }
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  PpoHyperparams hp = small_hp();
  hp.ent_coef = 0.01;
  PolicyBundle b = PolicyBundle::create(5, 3, hp, 3);
  std::mt19937 gen(8);
  b.log_std = random_matrix(3, 1, gen, 0.2);
  b.set_flat_parameters(b.flat_parameters() + random_matrix(b.num_parameters(), 1, gen, 0.05));
  const Minibatch batch = random_batch(b, 16, gen);
  const LossTerms terms = ppo_loss(b, batch);
  const Eigen::VectorXd theta = b.flat_parameters();
  double worst = 0.0;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double h = 1e-6;
    PolicyBundle p = b, m = b;
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    p.set_flat_parameters(tp);
    m.set_flat_parameters(tm);
    const double fd = (ppo_loss(p, batch).loss - ppo_loss(m, batch).loss) / (2 * h);
    const double err = std::abs(fd - terms.gradient[k]) / std::max(1e-3, std::abs(fd) + std::abs(terms.gradient[k]));
    worst = std::max(worst, err);
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(Loss, ClippedSurrogateCases) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, 2.0, 0.2), 2.4);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, 2.0, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.5, -2.0, 0.2), -3.0);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -2.0, 0.2), -1.6);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.1, 1.0, 0.2), 1.1);
}

TEST(Loss, ValueTermMatchesMeanSquaredError) {
  PpoHyperparams hp = small_hp();
  PolicyBundle b = PolicyBundle::create(5, 3, hp, 1);
  std::mt19937 gen(3);
  const Minibatch batch = random_batch(b, 8, gen);
  const Eigen::RowVectorXd v = b.critic.forward(batch.obs).row(0);
  double mse = 0.0;
  for (int i = 0; i < 8; ++i) mse += (v[i] - batch.returns[i]) * (v[i] - batch.returns[i]);
  EXPECT_NEAR(ppo_loss(b, batch).value_loss, mse / 8, 1e-12);
}

TEST(Gae, MatchesExplicitSeries) {
  std::mt19937 gen(12);
  std::normal_distribution<double> n(0, 1);
  std::bernoulli_distribution end(0.05);
  for (int trial = 0; trial < 20; ++trial) {
    const int len = 50 + trial * 10;
    std::vector<double> r(len), v(len);
    std::vector<bool> done(len);
    for (int i = 0; i < len; ++i) {
      r[i] = n(gen);
      v[i] = n(gen);
      done[i] = end(gen);
    }
    const double last = n(gen);
    const GaeResult got = compute_gae(r, v, done, last, 0.999, 0.95);
    const auto expected = oracle::gae_series(r, v, done, last, 0.999, 0.95);
    for (int i = 0; i < len; ++i) {
      ASSERT_NEAR(got.advantages[i], expected[i], 1e-10);
      ASSERT_NEAR(got.returns[i], expected[i] + v[i], 1e-10);
    }
  }
}

TEST(Adam, MatchesHandComputedSteps) {
  AdamState s;
  Eigen::VectorXd p(2);
  p << 1.0, -2.0;
  Eigen::VectorXd g(2);
  g << 0.3, -0.4;  // norm 0.5, no clipping at 0.5
  double norm = adam_step(s, p, g, 0.01, 0.5);
  EXPECT_DOUBLE_EQ(norm, 0.5);
  // First step moves each coordinate by lr * sign(g) up to eps.
  EXPECT_NEAR(p[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], -2.0 + 0.01 * 0.4 / (0.4 + 1e-8), 1e-15);

  Eigen::VectorXd g2(2);
  g2 << 3.0, 4.0;  // norm 5, clipped to 0.5: (0.3, 0.4)
  const Eigen::VectorXd before = p;
  norm = adam_step(s, p, g2, 0.01, 0.5);
  EXPECT_DOUBLE_EQ(norm, 5.0);
  const double m0 = 0.9 * 0.1 * 0.3 + 0.1 * 0.3, v0 = 0.999 * 0.001 * 0.09 + 0.001 * 0.09;
  const double m1 = 0.9 * 0.1 * -0.4 + 0.1 * 0.4, v1 = 0.999 * 0.001 * 0.16 + 0.001 * 0.16;
  const double c1 = 1 - 0.81, c2 = 1 - 0.999 * 0.999;
  EXPECT_NEAR(p[0], before[0] - 0.01 * (m0 / c1) / (std::sqrt(v0 / c2) + 1e-8), 1e-14);
  EXPECT_NEAR(p[1], before[1] - 0.01 * (m1 / c1) / (std::sqrt(v1 / c2) + 1e-8), 1e-14);
  EXPECT_EQ(s.step, 2);
}

TEST(Normalizer, MomentsMatchPooledClosedForm) {
  RewardNormalizer norm(1, 0.9);
  std::mt19937 gen(4);
  std::normal_distribution<double> n(-50, 20);
  std::vector<double> returns;
  double ret = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double r = n(gen);
    const bool done = i % 50 == 49;
    const auto [mean_before, var_before] = oracle::pooled_moments(returns);
    const double scaled = norm.normalize(0, r, done);
    EXPECT_NEAR(scaled, std::clamp(r / std::sqrt(var_before + 1e-8), -10.0, 10.0), 1e-9 * (1 + std::abs(scaled)));
    ret = ret * 0.9 + r;
    returns.push_back(ret);
    if (done) ret = 0.0;
    const auto [mean, var] = oracle::pooled_moments(returns);
    ASSERT_NEAR(norm.moments().mean, mean, 1e-9 * (1 + std::abs(mean)));
    ASSERT_NEAR(norm.moments().var, var, 1e-9 * (1 + var));
    (void)mean_before;
  }
  EXPECT_EQ(norm.returns()[0], 0.0);
  const RunningMoments frozen = norm.moments();
  (void)norm.scale(123.0);
  EXPECT_EQ(norm.moments().var, frozen.var);
}

TEST(Normalizer, ActorsKeepSeparateReturns) {
  RewardNormalizer norm(2, 0.5);
  norm.normalize(0, 4.0, false);
  norm.normalize(1, 2.0, false);
  norm.normalize(0, 1.0, false);
  EXPECT_EQ(norm.returns()[0], 3.0);
  EXPECT_EQ(norm.returns()[1], 2.0);
}

TEST(Policy, ModeIsDeterministicAndClipped) {
  const PolicyBundle b = PolicyBundle::create(27, 14, PpoHyperparams{}, 11);
  EXPECT_EQ(b.log_std, Eigen::VectorXd::Zero(14));
  std::vector<double> obs(27, 0.3);
  const PolicySample a = policy_mode(b, obs);
  const PolicySample c = policy_mode(b, obs);
  EXPECT_EQ(a.action, c.action);
  const PolicySample z = policy_sample(b, obs, std::vector<double>(14, 0.0));
  EXPECT_EQ(z.action, a.action);
  const PolicySample wild = policy_sample(b, obs, std::vector<double>(14, 50.0));
  for (double v : wild.action) EXPECT_EQ(v, 1.0);
  for (double v : wild.raw) EXPECT_GT(v, 1.0);
}

TEST(Policy, LogProbMatchesDensity) {
  Eigen::VectorXd x(2), m(2), ls(2);
  x << 0.5, -1.0;
  m << 0.0, 0.0;
  ls << 0.0, std::log(2.0);
  const double expected = -0.5 * 0.25 - 0.5 * 0.25 - std::log(2.0) - std::log(2 * M_PI);
  EXPECT_NEAR(gaussian_log_prob(x, m, ls), expected, 1e-12);
}

TEST(Checkpoint, RoundTripIsExact) {
  PolicyBundle b = PolicyBundle::create(27, 14, small_hp(), 5);
  std::mt19937 gen(1);
  b.set_flat_parameters(b.flat_parameters() + random_matrix(b.num_parameters(), 1, gen, 1.0 / 3.0));
  b.optimizer.m = random_matrix(b.num_parameters(), 1, gen);
  b.optimizer.v = random_matrix(b.num_parameters(), 1, gen).cwiseAbs();
  b.optimizer.step = 17;
  b.normalizer = RewardNormalizer(4, 0.999);
  b.normalizer.normalize(2, -1234.5, false);
  b.env_steps = 4096;
  b.updates = 1;
  const auto dir = std::filesystem::temp_directory_path() / "scplan_checkpoint_test";
  const std::string path = (dir / "policy.json").string();
  save_checkpoint(b, path);
  const PolicyBundle back = load_checkpoint(path);
  EXPECT_EQ(back.flat_parameters(), b.flat_parameters());
  EXPECT_EQ(back.optimizer.m, b.optimizer.m);
  EXPECT_EQ(back.optimizer.v, b.optimizer.v);
  EXPECT_EQ(back.optimizer.step, 17);
  EXPECT_EQ(back.normalizer.moments().var, b.normalizer.moments().var);
  EXPECT_EQ(back.normalizer.returns(), b.normalizer.returns());
  EXPECT_EQ(back.env_steps, 4096u);
  EXPECT_EQ(back.hp.hidden, b.hp.hidden);
  std::vector<double> obs(27, -0.2);
  EXPECT_EQ(policy_mode(back, obs).action, policy_mode(b, obs).action);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, CorruptInputIsRejected) {
  EXPECT_THROW(checkpoint_from_json("{"), CheckpointError);
  EXPECT_THROW(checkpoint_from_json("{\"format\": \"other\"}"), CheckpointError);
  std::string text = checkpoint_to_json(PolicyBundle::create(3, 2, small_hp(), 1));
  const std::string key = "\"version\": 1";
  const auto pos = text.find(key);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, key.size(), "\"version\": 9");
  EXPECT_THROW(checkpoint_from_json(text), CheckpointError);
}

TEST(Hyperparams, DefaultsAndChecks) {
  const PpoHyperparams hp;
  EXPECT_TRUE(hp.check().empty());
  EXPECT_EQ(hp.n_steps, 1024);
  EXPECT_EQ(hp.n_epochs, 20);
  EXPECT_EQ(hp.batch_size, 64);
  EXPECT_DOUBLE_EQ(hp.vf_coef, 0.88331);
  EXPECT_DOUBLE_EQ(hp.gamma, 0.999);
  PpoHyperparams bad = hp;
  bad.batch_size = 0;
  EXPECT_FALSE(bad.check().empty());
  bad = hp;
  bad.clip_range = -1;
  EXPECT_FALSE(bad.check().empty());
}
