#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scplan/evaluation.hpp"

namespace scplan {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Pivotal bootstrap interval for the mean:
/// (2 m - q_hi, 2 m - q_lo) over resampled means. Needs two samples.
Interval bootstrap_ci(const std::vector<double>& samples, int iterations = 10'000,
                      double confidence = 0.95, std::uint64_t seed = 0x5EED);

struct Gain {
  double value = 0.0;    // lp - ppo
  double percent = 0.0;  // of lp
};

Gain compute_gain(double lp_mean, double ppo_mean);

/// One scenario's line of the comparison table.
struct ComparisonRow {
  std::string scenario;
  MeanStd bound;
  MeanStd lp;
  MeanStd ppo;
  Gain gain;
  Interval lp_ci;
  Interval ppo_ci;
  int episodes = 0;
};

/// Throws std::invalid_argument when the reports do not cover the same
/// realizations, in the same order; `bounds` must be one value per LP episode.
/// The PPO report may hold several passes over the episode set.
ComparisonRow compare_report(const std::string& scenario, const EvalReport& lp, const EvalReport& ppo,
                             const std::vector<double>& bounds, int iterations = 10'000);

}  // namespace scplan
