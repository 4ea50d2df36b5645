#include "scplan/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scplan {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t RngStream::bits(StreamPurpose purpose, std::uint64_t entity,
                              std::uint64_t step, std::uint64_t draw) const {
  std::uint64_t h = splitmix64(seed_);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ entity);
  h = splitmix64(h ^ step);
  return splitmix64(h ^ draw);
}

double RngStream::uniform(StreamPurpose purpose, std::uint64_t entity, std::uint64_t step,
                          std::uint64_t draw) const {
  return static_cast<double>(bits(purpose, entity, step, draw) >> 11) * 0x1.0p-53;
}

double RngStream::normal(StreamPurpose purpose, std::uint64_t entity, std::uint64_t step,
                         std::uint64_t draw) const {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform(purpose, entity, step, 2 * draw);
  const double u2 = uniform(purpose, entity, step, 2 * draw + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string check_demand_spec(const DemandSpec& s) {
  if (!(s.clip_min <= s.sin_min && s.sin_min <= s.sin_max && s.sin_max <= s.clip_max))
    return "demand bounds must satisfy clip_min <= sin_min <= sin_max <= clip_max";
  if (s.peaks < 1) return "demand peaks must be at least 1";
  if (s.perturbation.kind == Perturbation::Kind::gaussian && s.perturbation.sigma < 0.0)
    return "gaussian perturbation needs sigma >= 0";
  if (s.perturbation.kind == Perturbation::Kind::uniform &&
      s.perturbation.low > s.perturbation.high)
    return "uniform perturbation needs low <= high";
  return {};
}

std::string check_lead_time_spec(const LeadTimeSpec& s) {
  if (!(1 <= s.average && s.average <= s.maximum))
    return "lead times must satisfy 1 <= average <= maximum";
  return {};
}

int poisson_inverse(double rate, double u) {
  if (rate <= 0.0) return 0;
  double p = std::exp(-rate);
  double cdf = p;
  int k = 0;
  // The cap only guards against u rounding onto the CDF's limit.
  while (u > cdf && k < 10000) {
    ++k;
    p *= rate / k;
    cdf += p;
  }
  return k;
}

double sinusoid(const DemandSpec& spec, int t, int horizon) {
  const double amplitude = (spec.sin_max - spec.sin_min) / 2.0;
  const double angle = 2.0 * spec.peaks * t * std::numbers::pi / horizon;
  return spec.sin_min + amplitude * (1.0 + std::sin(angle));
}

double forecast_demand(const DemandSpec& spec, int t, int horizon) {
  return spec.kind == DemandKind::seasonal ? sinusoid(spec, t, horizon) : spec.regular_mean;
}

double sample_demand(const DemandSpec& spec, int retailer, int t, int horizon,
                     const RngStream& rng) {
  double value = forecast_demand(spec, t, horizon);
  const auto entity = static_cast<std::uint64_t>(retailer);
  const auto step = static_cast<std::uint64_t>(t);
  switch (spec.perturbation.kind) {
    case Perturbation::Kind::none:
      break;
    case Perturbation::Kind::gaussian:
      value += spec.perturbation.sigma * rng.normal(StreamPurpose::demand, entity, step);
      break;
    case Perturbation::Kind::uniform: {
      const double u = rng.uniform(StreamPurpose::demand, entity, step);
      value += spec.perturbation.low + (spec.perturbation.high - spec.perturbation.low) * u;
      break;
    }
  }
  return std::clamp(value, spec.clip_min, spec.clip_max);
}

int sample_lead_time(const LeadTimeSpec& spec, StreamPurpose purpose, int entity, int t,
                     const RngStream& rng) {
  if (spec.kind == LeadTimeSpec::Kind::constant) return spec.average;
  const double u =
      rng.uniform(purpose, static_cast<std::uint64_t>(entity), static_cast<std::uint64_t>(t));
  return std::min(poisson_inverse(spec.average - 1, u) + 1, spec.maximum);
}

}  // namespace scplan
