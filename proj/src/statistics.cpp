#include "scplan/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scplan/stochastic.hpp"

namespace scplan {

namespace {

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Interval bootstrap_ci(const std::vector<double>& samples, int iterations, double confidence,
                      std::uint64_t seed) {
  if (samples.size() < 2) throw std::invalid_argument("bootstrap needs at least 2 samples");
  if (iterations < 1) throw std::invalid_argument("bootstrap needs at least one iteration");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
  const std::size_t n = samples.size();
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) return {*lo, *lo};

  const RngStream rng(seed);
  std::vector<double> means(static_cast<std::size_t>(iterations));
  for (int b = 0; b < iterations; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform(StreamPurpose::bootstrap, static_cast<std::uint64_t>(b), i);
      sum += samples[std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1)];
    }
    means[static_cast<std::size_t>(b)] = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = 1.0 - confidence;
  Interval out{2.0 * mean - quantile(means, 1.0 - alpha / 2.0), 2.0 * mean - quantile(means, alpha / 2.0)};
  out.low = std::min(out.low, mean);
  out.high = std::max(out.high, mean);
  return out;
}

Gain compute_gain(double lp_mean, double ppo_mean) {
  Gain g;
  g.value = lp_mean - ppo_mean;
  g.percent = lp_mean != 0.0 ? 100.0 * g.value / lp_mean : 0.0;
  return g;
}

ComparisonRow compare_report(const std::string& scenario, const EvalReport& lp, const EvalReport& ppo,
                             const std::vector<double>& bounds, int iterations) {
  const std::size_t n = lp.episodes.size();
  if (n == 0) throw std::invalid_argument("empty LP report");
  if (ppo.episodes.empty() || ppo.episodes.size() % n != 0)
    throw std::invalid_argument("PPO report does not cover the LP episode set");
  for (std::size_t i = 0; i < ppo.episodes.size(); ++i)
    if (ppo.episodes[i].digest != lp.episodes[i % n].digest || ppo.episodes[i].seed != lp.episodes[i % n].seed)
      throw std::invalid_argument("reports were run on different episode realizations");
  if (!bounds.empty() && bounds.size() != n) throw std::invalid_argument("one bound per episode expected");

  ComparisonRow row;
  row.scenario = scenario;
  row.episodes = static_cast<int>(n);
  if (!bounds.empty()) row.bound = mean_std(bounds);
  row.lp = mean_std(lp.costs());
  row.ppo = mean_std(ppo.costs());
  row.gain = compute_gain(row.lp.mean, row.ppo.mean);
  if (n >= 2) row.lp_ci = bootstrap_ci(lp.costs(), iterations);
  if (ppo.episodes.size() >= 2) row.ppo_ci = bootstrap_ci(ppo.costs(), iterations);
  return row;
}

}  // namespace scplan
