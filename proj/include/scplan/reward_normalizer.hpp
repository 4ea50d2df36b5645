#pragma once

#include <vector>

namespace scplan {

/// Running mean and variance by the parallel (Chan et al.) update.
struct RunningMoments {
  double mean = 0.0;
  double var = 1.0;
  double count = 1e-4;

  void update(double x);
};

/// Scales rewards by the running standard deviation of the discounted
/// return, one return accumulator per actor.
class RewardNormalizer {
 public:
  RewardNormalizer() = default;
  RewardNormalizer(int actors, double gamma, double clip = 10.0, double epsilon = 1e-8);

  /// Scales with the variance before this reward, then updates the
  /// statistics. `done` resets the actor's accumulator afterwards.
  double normalize(int actor, double reward, bool done);
  /// Scaling with frozen statistics.
  double scale(double reward) const;

  const RunningMoments& moments() const { return moments_; }
  const std::vector<double>& returns() const { return returns_; }
  double gamma() const { return gamma_; }
  double clip() const { return clip_; }
  double epsilon() const { return epsilon_; }
  void restore(const RunningMoments& moments, std::vector<double> returns) {
    moments_ = moments;
    returns_ = std::move(returns);
  }

 private:
  RunningMoments moments_;
  std::vector<double> returns_;
  double gamma_ = 0.99;
  double clip_ = 10.0;
  double epsilon_ = 1e-8;
};

}  // namespace scplan
