#include "scplan/reward_normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scplan {

void RunningMoments::update(double x) {
  const double total = count + 1.0;
  const double delta = x - mean;
  const double m2 = var * count + delta * delta * count / total;
  mean += delta / total;
  var = m2 / total;
  count = total;
}

RewardNormalizer::RewardNormalizer(int actors, double gamma, double clip, double epsilon)
    : returns_(static_cast<std::size_t>(actors), 0.0), gamma_(gamma), clip_(clip), epsilon_(epsilon) {
  if (actors < 1) throw std::invalid_argument("reward normalizer needs at least one actor");
}

double RewardNormalizer::scale(double reward) const {
  return std::clamp(reward / std::sqrt(moments_.var + epsilon_), -clip_, clip_);
}

double RewardNormalizer::normalize(int actor, double reward, bool done) {
  const double scaled = scale(reward);
  double& ret = returns_.at(static_cast<std::size_t>(actor));
  ret = ret * gamma_ + reward;
  moments_.update(ret);
  if (done) ret = 0.0;
  return scaled;
}

}  // namespace scplan
