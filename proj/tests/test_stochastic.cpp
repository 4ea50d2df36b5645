#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "scplan/scenario.hpp"
#include "scplan/stochastic.hpp"

using namespace scplan;

TEST(Sinusoid, ReferencePoints) {
  DemandSpec s;
  EXPECT_NEAR(sinusoid(s, 0, 360), 200.0, 1e-12);
  EXPECT_NEAR(sinusoid(s, 45, 360), 300.0, 1e-12);
  EXPECT_NEAR(sinusoid(s, 135, 360), 100.0, 1e-12);
}

TEST(Sinusoid, MatchesClosedForm) {
  DemandSpec s;
  s.peaks = 3;
  s.sin_min = 50;
  s.sin_max = 250;
  for (int t = 0; t <= 360; t += 7) {
    const double expected = 50 + 100 * (1 + std::sin(2.0 * 3 * t * std::numbers::pi / 360));
    EXPECT_NEAR(sinusoid(s, t, 360), expected, 1e-9);
  }
}

TEST(Demand, UnperturbedScenarios) {
  const ScenarioSpec r = builtin_scenario("rN0");
  const ScenarioSpec n = builtin_scenario("N0");
  const RngStream rng(5);
  for (int t = 1; t <= 360; ++t) {
    EXPECT_EQ(sample_demand(r.demand, 0, t, 360, rng), 200.0);
    const double d = sample_demand(n.demand, 1, t, 360, rng);
    EXPECT_GE(d, 100.0 - 1e-9);
    EXPECT_LE(d, 300.0 + 1e-9);
  }
  EXPECT_NEAR(sample_demand(n.demand, 0, 45, 360, rng), 300.0, 1e-9);
}

TEST(Demand, PerturbedValuesStayClipped) {
  for (const char* name : {"N60", "rN100", "rU200"}) {
    const ScenarioSpec s = builtin_scenario(name);
    const RngStream rng(9);
    for (int t = 1; t <= 360; ++t)
      for (int k = 0; k < 2; ++k) {
        const double d = sample_demand(s.demand, k, t, 360, rng);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 400.0);
      }
  }
}

TEST(Demand, UniformPerturbationMean) {
  const ScenarioSpec s = builtin_scenario("rU200");
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_demand(s.demand, 0, 1 + i % 360, 360, RngStream(static_cast<std::uint64_t>(i / 360)));
  EXPECT_NEAR(sum / n, 200.0, 5.0);
}

TEST(Demand, GaussianPerturbationMoments) {
  // sigma 20 around the sinusoid never reaches the clip bounds in practice.
  const ScenarioSpec s = builtin_scenario("N20");
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int t = 1 + i % 360;
    const double e = sample_demand(s.demand, i % 2, t, 360, RngStream(static_cast<std::uint64_t>(i / 720))) -
                     sinusoid(s.demand, t, 360);
    sum += e;
    sq += e * e;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.3);
  EXPECT_NEAR(std::sqrt(sq / n), 20.0, 0.3);
}

TEST(LeadTime, ConstantIsAverage) {
  const LeadTimeSpec spec{LeadTimeSpec::Kind::constant, 2, 4};
  const RngStream rng(1);
  for (int t = 1; t <= 100; ++t) EXPECT_EQ(sample_lead_time(spec, StreamPurpose::transport_lead_time, t % 12, t, rng), 2);
}

TEST(LeadTime, StochasticDistribution) {
  const LeadTimeSpec spec{LeadTimeSpec::Kind::stochastic, 2, 4};
  const int n = 100000;
  std::vector<int> counts(5, 0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = sample_lead_time(spec, StreamPurpose::production_lead_time, i % 7, i, RngStream(77));
    ASSERT_GE(l, 1);
    ASSERT_LE(l, 4);
    ++counts[l];
    sum += l;
  }
  EXPECT_NEAR(counts[1] / double(n), std::exp(-1.0), 0.01);
  // 1 + E[min(Poisson(1), 3)] = 1 + sum_k min(k, 3) e^-1 / k!
  double expected = 1.0;
  double pmf = std::exp(-1.0);
  double tail = 1.0;
  for (int k = 0; k < 3; ++k) {
    expected += k * pmf;
    tail -= pmf;
    pmf /= (k + 1);
  }
  expected += 3 * tail;
  EXPECT_NEAR(sum / n, expected, 0.02);
}

TEST(Poisson, InversionMatchesCdf) {
  EXPECT_EQ(poisson_inverse(1.0, 0.0), 0);
  EXPECT_EQ(poisson_inverse(1.0, std::exp(-1.0) - 1e-12), 0);
  EXPECT_EQ(poisson_inverse(1.0, std::exp(-1.0) + 1e-12), 1);
  EXPECT_EQ(poisson_inverse(1.0, 2 * std::exp(-1.0) + 1e-12), 2);
  EXPECT_EQ(poisson_inverse(0.0, 0.9), 0);
}

TEST(Rng, DeterministicAndIsolated) {
  const RngStream a(123), b(123), c(124);
  EXPECT_EQ(a.bits(StreamPurpose::demand, 0, 5), b.bits(StreamPurpose::demand, 0, 5));
  EXPECT_NE(a.bits(StreamPurpose::demand, 0, 5), c.bits(StreamPurpose::demand, 0, 5));
  EXPECT_NE(a.bits(StreamPurpose::demand, 0, 5), a.bits(StreamPurpose::demand, 1, 5));
  EXPECT_NE(a.bits(StreamPurpose::demand, 0, 5), a.bits(StreamPurpose::production_lead_time, 0, 5));
  // Querying other entities first does not change an entity's values.
  const double first = a.uniform(StreamPurpose::demand, 1, 10);
  for (int e = 0; e < 100; ++e) (void)a.uniform(StreamPurpose::demand, e, 10);
  EXPECT_EQ(a.uniform(StreamPurpose::demand, 1, 10), first);
}

TEST(Rng, UniformAndNormalMoments) {
  const RngStream rng(2024);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(StreamPurpose::actor, 0, static_cast<std::uint64_t>(i));
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal(StreamPurpose::actor, 1, static_cast<std::uint64_t>(i));
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.003);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(DemandSpec, InvariantsChecked) {
  DemandSpec s;
  EXPECT_TRUE(check_demand_spec(s).empty());
  s.sin_min = 350;
  EXPECT_FALSE(check_demand_spec(s).empty());
  s = DemandSpec{};
  s.peaks = 0;
  EXPECT_FALSE(check_demand_spec(s).empty());
  s = DemandSpec{};
  s.perturbation = Perturbation::uniform(10, -10);
  EXPECT_FALSE(check_demand_spec(s).empty());
  EXPECT_FALSE(check_lead_time_spec({LeadTimeSpec::Kind::stochastic, 5, 4}).empty());
  EXPECT_FALSE(check_lead_time_spec({LeadTimeSpec::Kind::stochastic, 0, 4}).empty());
}
