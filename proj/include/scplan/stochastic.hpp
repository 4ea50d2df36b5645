#pragma once

#include <cstdint>
#include <string>

namespace scplan {

enum class DemandKind { seasonal, regular };

struct Perturbation {
  enum class Kind { none, gaussian, uniform };

  Kind kind = Kind::none;
  double sigma = 0.0;  // gaussian
  double low = 0.0;    // uniform
  double high = 0.0;

  static Perturbation none() { return {}; }
  static Perturbation gaussian(double sigma) { return {Kind::gaussian, sigma, 0.0, 0.0}; }
  static Perturbation uniform(double low, double high) {
    return {Kind::uniform, 0.0, low, high};
  }
};

struct DemandSpec {
  DemandKind kind = DemandKind::seasonal;
  double sin_min = 100.0;
  double sin_max = 300.0;
  double clip_min = 0.0;
  double clip_max = 400.0;
  int peaks = 2;
  Perturbation perturbation;
  double regular_mean = 200.0;
};

struct LeadTimeSpec {
  enum class Kind { constant, stochastic };

  Kind kind = Kind::constant;
  int average = 2;
  int maximum = 4;
};

/// Returns an empty string when the spec is usable, otherwise the first
/// violated invariant.
std::string check_demand_spec(const DemandSpec& spec);
std::string check_lead_time_spec(const LeadTimeSpec& spec);

enum class StreamPurpose : std::uint64_t {
  demand = 1,
  production_lead_time = 2,
  transport_lead_time = 3,
  episode = 4,
  actor = 5,
  evaluation = 6,
  bootstrap = 7,
  tuning = 8,
};

/// Counter-based random source. Every draw is a pure function of
/// (seed, purpose, entity, step, draw index), so the order in which entities
/// are queried never changes any entity's own values.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(StreamPurpose purpose, std::uint64_t entity, std::uint64_t step,
                     std::uint64_t draw = 0) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(StreamPurpose purpose, std::uint64_t entity, std::uint64_t step,
                 std::uint64_t draw = 0) const;
  /// Standard normal from draws (2*draw, 2*draw + 1) by Box-Muller.
  double normal(StreamPurpose purpose, std::uint64_t entity, std::uint64_t step,
                std::uint64_t draw = 0) const;
  /// Derived seed for an independent child stream.
  std::uint64_t derive(StreamPurpose purpose, std::uint64_t entity,
                       std::uint64_t step = 0) const {
    return bits(purpose, entity, step, 0xD1CEu);
  }

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Poisson(rate) by sequential search on the CDF for a given uniform u.
int poisson_inverse(double rate, double u);

/// Seasonal curve without perturbation.
double sinusoid(const DemandSpec& spec, int t, int horizon);

/// Perturbation-free value: the sinusoid for seasonal demand, the mean for
/// regular demand.
double forecast_demand(const DemandSpec& spec, int t, int horizon);

/// Demand at `retailer` (its ordinal among retailers) for step t, drawn from
/// the (demand, retailer, t) substream.
double sample_demand(const DemandSpec& spec, int retailer, int t, int horizon,
                     const RngStream& rng);

/// Lead time in [1, maximum] for a dispatch at step t. `purpose` separates
/// production lead times (entity = supplier node) from transport lead times
/// (entity = link index).
int sample_lead_time(const LeadTimeSpec& spec, StreamPurpose purpose, int entity, int t,
                     const RngStream& rng);

}  // namespace scplan
