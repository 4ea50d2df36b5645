// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scplan/codec.hpp"
#include "scplan/evaluation.hpp"
#include "scplan/lp_agent.hpp"
#include "scplan/lp_model.hpp"
#include "scplan/lp_solver.hpp"
#include "scplan/ppo.hpp"
#include "scplan/statistics.hpp"
#include "scplan/trainer.hpp"

using namespace scplan;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

void fail(Verdict& v, const std::string& why) {
  if (v.pass) v.detail = why;
  v.pass = false;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SupplyChainState empty_state(const ChainConfig& c) {
  SupplyChainState st;
  st.horizon = c.horizon;
  st.stocks.assign(static_cast<std::size_t>(c.num_nodes()), 0.0);
  st.production_pipeline.assign(static_cast<std::size_t>(c.num_nodes()), {});
  for (int n : c.suppliers()) st.production_pipeline[n].assign(4, 0.0);
  st.transport_pipeline.assign(c.links.size(), std::vector<double>(4, 0.0));
  st.next_demands.assign(c.retailers().size(), 0.0);
  return st;
}

// 1. Published normalization rows and decode examples.
Verdict codec_fidelity() {
  Verdict v;
  ScenarioSpec s = builtin_scenario("N20");
  s.chain.stock_cap.assign(8, 500.0);
  s.chain.production_cap = {400, 400, 0, 0, 0, 0, 0, 0};
  Observation obs{std::vector<double>(27, 0.0)};
  obs.values[0] = 400;
  obs.values[10] = 330;
  obs.values[11] = 105;
  obs.values[12] = 280;
  obs.values[13] = 420;
  obs.values[24] = 138;
  obs.values[26] = 330;
  const auto z = normalize_observation(obs, s);
  const std::vector<std::pair<int, double>> rows = {{0, 0.600}, {10, 0.650}, {11, -0.825}, {12, -0.440},
                                                    {13, -0.720}, {24, -0.310}, {26, 0.833}};
  for (const auto& [i, published] : rows)
    if (std::abs(z[i] - published) > 5e-4) fail(v, fmt("normalized entry %.0f is %.4f, expected %.3f", i, z[i], published));

  std::vector<double> a(14, -1.0);
  a[0] = 0.050;
  const RawAction prod = decode_action(a, empty_state(s.chain), s.chain);
  if (std::abs(prod.production[0] - 210.0) > 1e-9) fail(v, fmt("production decode %.6f, expected 210", prod.production[0]));

  const ChainConfig c = default_chain();
  SupplyChainState st = empty_state(c);
  st.stocks[2] = 15;
  st.transport_pipeline[c.link_index(0, 2)][0] = 130;
  st.transport_pipeline[c.link_index(1, 2)][0] = 150;
  std::vector<double> ship(14, -1.0);
  const int w1 = c.link_index(2, 4), w2 = c.link_index(2, 5);
  ship[2 + w1] = 0.492;
  ship[2 + w2] = -0.864;
  const RawAction q = decode_action(ship, st, c);
  const double keep = 295.0 - q.shipments[w1] - q.shipments[w2];
  if (std::abs(q.shipments[w1] - 200) > 1 || std::abs(q.shipments[w2] - 20) > 1 || std::abs(keep - 75) > 1)
    fail(v, fmt("shipment decode %.2f / %.2f keep %.2f", q.shipments[w1], q.shipments[w2], keep));
  if (v.pass) v.detail = fmt("7 rows within 5e-4, production 210, shipments %.1f/%.1f keep %.1f", q.shipments[w1], q.shipments[w2], keep);
  return v;
}

// 2. decode(encode(q)) = q on random feasible quantities.
Verdict codec_round_trip() {
  Verdict v;
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    ChainConfig c = default_chain();
    if (trial % 2) c.factory_cut_units = FactoryCutUnits::product;
    SupplyChainState st = empty_state(c);
    for (int n = 0; n < 8; ++n) st.stocks[n] = u(gen) < 0.1 ? 0.0 : u(gen) * c.stock_cap[n];
    for (auto& pipe : st.transport_pipeline)
      if (u(gen) < 0.5) pipe[0] = u(gen) * 300;
    RawAction q = RawAction::zeros(c);
    for (int i = 0; i < 2; ++i) q.production[i] = u(gen) * c.production_cap[i];
    for (int n = 0; n < 6; ++n) {
      const auto out = c.outgoing_links(n);
      const double base = cut_base(st, c, n);
      const double total = u(gen) < 0.1 ? base : u(gen) * base;
      const double roll = u(gen);
      const double share = roll < 0.1 ? 0.0 : roll < 0.2 ? 0.5 : u(gen);
      q.shipments[out[0]] = total * share;
      q.shipments[out[1]] = total * (1 - share);
    }
    RawAction back;
    try {
      back = decode_action(encode_plan(q, st, c), st, c);
    } catch (const std::exception& e) {
      fail(v, std::string("encode rejected a feasible plan: ") + e.what());
      continue;
    }
    for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(back.production[i] - q.production[i]) / c.production_cap[i]);
    for (int l = 0; l < c.num_links(); ++l) {
      const double base = cut_base(st, c, c.links[l].source);
      if (base <= 0.0) continue;
      worst = std::max(worst, std::abs(back.shipments[l] - q.shipments[l]) / base);
      ++checked;
    }
  }
  if (worst > 1e-9) fail(v, fmt("worst relative error %.3g", worst));
  if (v.pass) v.detail = fmt("10000 plans, %.0f shipments checked, worst relative error %.3g", checked, worst);
  return v;
}

// 3. Mass balance and reward identity on random-action episodes.
Verdict simulator_invariants() {
  Verdict v;
  const auto& names = builtin_scenario_names();
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst_balance = 0.0, worst_reward = 0.0;
  for (int e = 0; e < 1000; ++e) {
    const ScenarioSpec s = builtin_scenario(names[static_cast<std::size_t>(e) % names.size()]);
    const ChainConfig& c = s.chain;
    Simulator sim(s);
    sim.reset(static_cast<std::uint64_t>(10'000 + e));
    while (!sim.done()) {
      std::vector<double> act(14);
      for (double& x : act) x = u(gen);
      const StepOutcome out = sim.step(decode_action(act, sim.state(), c));
      const StepFlows& f = out.flows;
      for (int n = 0; n < c.num_nodes(); ++n) {
        const double consumed = c.is_factory[n] ? c.processing_ratio[n] * f.shipped[n] : f.shipped[n];
        const double expected = f.stock_before[n] + f.arrived[n] - f.discarded[n] - f.demand_met[n] - consumed;
        const double scale = 1.0 + f.stock_before[n] + f.arrived[n];
        worst_balance = std::max(worst_balance, std::abs(f.stock_after[n] - expected) / scale);
        if (f.stock_after[n] < 0.0 || f.stock_after[n] > c.stock_cap[n])
          fail(v, s.name + ": stock outside [0, capacity] at " + c.node_names[n]);
      }
      double total = 0.0;
      for (double x : out.costs.values) total += x;
      worst_reward = std::max(worst_reward, std::abs(out.reward + total) / std::max(1.0, total));
    }
  }
  if (worst_balance > 1e-12) fail(v, fmt("mass balance residual %.3g", worst_balance));
  if (worst_reward > 1e-12) fail(v, fmt("reward identity residual %.3g", worst_reward));
  if (v.pass)
    v.detail = fmt("1000 episodes, worst relative residuals: balance %.2g, reward %.2g", worst_balance, worst_reward);
  return v;
}

// 4. LP against exhaustive search and the zero-demand hand optimum.
Verdict lp_optimality() {
  Verdict v;
  double worst = 0.0;
  for (std::uint32_t seed = 100; seed < 150; ++seed) {
    const oracle::TinyInstance inst = oracle::random_tiny_instance(seed);
    const double expected = oracle::TinyDp(inst).optimum();
    const LpResult r = solve_lp(build_lp(inst.scenario, inst.det).problem);
    if (r.status != LpStatus::optimal) {
      fail(v, "tiny instance " + std::to_string(seed) + " not solved to optimality");
      continue;
    }
    worst = std::max(worst, std::abs(r.objective - expected) / std::max(1.0, std::abs(expected)));
  }
  if (worst > 1e-6) fail(v, fmt("tiny instances: worst relative gap to exhaustive search %.3g", worst));
  const oracle::ZeroDemandInstance z = oracle::zero_demand_instance();
  const LpResult r = solve_lp(build_lp(z.scenario, z.det).problem);
  const double gap = std::abs(r.objective - z.hand_optimum) / z.hand_optimum;
  if (r.status != LpStatus::optimal || gap > 1e-8)
    fail(v, fmt("zero-demand optimum %.4f, hand value %.0f", r.objective, z.hand_optimum));
  if (v.pass) v.detail = fmt("50 tiny instances within %.2g, zero-demand %.3f vs %.0f", worst, r.objective, z.hand_optimum);
  return v;
}

// 5. LP replay on deterministic scenarios.
Verdict deterministic_consistency() {
  Verdict v;
  std::string detail;
  for (const char* name : {"N0cl", "rN0cl"}) {
    const ScenarioSpec s = builtin_scenario(name);
    const LpPlan plan = solve_forecast_plan(s);
    LpAgent agent(plan);
    const EvalReport report = evaluate_agent(agent, s, episode_seeds({{101, 202, 303}, 2}));
    double worst = 0.0;
    for (const auto& e : report.episodes) worst = std::max(worst, std::abs(e.total_cost - plan.objective) / plan.objective);
    if (worst > 1e-6) fail(v, std::string(name) + fmt(": replay differs from objective by %.3g relative", worst));
    if (report.std_cost > 1e-6 * plan.objective) fail(v, std::string(name) + fmt(": std %.3g", report.std_cost));
    detail += std::string(name) + fmt(" %.0f (std %.2g); ", plan.objective, report.std_cost);
    if (std::string(name) == "N0cl") {
      const double rel = plan.objective / 7'941'000.0 - 1.0;
      if (std::abs(rel) > 0.10) fail(v, fmt("N0cl objective %.0f is %.1f%% from 7,941k", plan.objective, 100 * rel));
      detail += fmt("N0cl vs 7,941k: %+.1f%%; ", 100 * rel);
    }
  }
  if (v.pass) v.detail = detail;
  return v;
}

// 6. Perfect-information bound below both agents on every episode.
Verdict bound_dominance(const PolicyBundle& ppo_policy) {
  Verdict v;
  std::string detail;
  const auto seeds = episode_seeds(default_eval_plan());
  for (const char* name : {"N20", "rN50"}) {
    const ScenarioSpec s = builtin_scenario(name);
    LpAgent lp(solve_forecast_plan(s));
    PpoAgent ppo(ppo_policy, s);
    Simulator sim(s);
    int violations = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : seeds) {
      const double lp_cost = run_episode(lp, sim, seed).total_cost;
      const double ppo_cost = run_episode(ppo, sim, seed).total_cost;
      const double bound = perfect_information_bound(s, sim.realization());
      const double best = std::min(lp_cost, ppo_cost);
      // Solver tolerance on the bound: relative gap 1e-10 plus residuals.
      if (bound > best * (1.0 + 1e-8)) ++violations;
      tightest = std::min(tightest, best / bound);
    }
    if (violations) fail(v, std::string(name) + ": " + std::to_string(violations) + " episodes with bound above an agent");
    detail += std::string(name) + fmt(" min cost/bound %.4f; ", tightest);
  }
  if (v.pass) v.detail = "100 episodes each, " + detail;
  return v;
}

// 7. Loss gradient and GAE.
Verdict gradient_check() {
  Verdict v;
  PpoHyperparams hp;
  hp.hidden = {4, 4};
  PolicyBundle b = PolicyBundle::create(4, 4, hp, 7);
  std::mt19937 gen(7);
  std::normal_distribution<double> n(0, 1);
  for (Eigen::Index i = 0; i < b.log_std.size(); ++i) b.log_std[i] = 0.2 * n(gen);
  Eigen::VectorXd theta = b.flat_parameters();
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.05 * n(gen);
  b.set_flat_parameters(theta);
  Minibatch batch;
  const int B = 32;
  batch.obs.resize(4, B);
  for (Eigen::Index i = 0; i < batch.obs.size(); ++i) batch.obs.data()[i] = n(gen);
  const Eigen::MatrixXd mean = b.actor.forward(batch.obs);
  batch.actions = mean;
  for (Eigen::Index i = 0; i < batch.actions.size(); ++i) batch.actions.data()[i] += 0.5 * n(gen);
  batch.old_log_prob.resize(B);
  batch.advantages.resize(B);
  batch.returns.resize(B);
  std::uniform_real_distribution<double> shift(-0.1, 0.1);
  for (int i = 0; i < B; ++i) {
    batch.old_log_prob[i] = gaussian_log_prob(batch.actions.col(i), mean.col(i), b.log_std) + shift(gen);
    batch.advantages[i] = 2 * n(gen);
    batch.returns[i] = 3 * n(gen);
  }
  const Eigen::VectorXd grad = ppo_loss(b, batch).gradient;
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
    worst = std::max(worst, std::abs(fd - grad[k]) / std::max(1e-3, std::abs(fd) + std::abs(grad[k])));
  }
  if (worst > 1e-4) fail(v, fmt("gradient relative error %.3g", worst));

  double gae_worst = 0.0;
  std::bernoulli_distribution end(0.05);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(50), val(50);
    std::vector<bool> done(50);
    for (int i = 0; i < 50; ++i) {
      r[i] = n(gen);
      val[i] = n(gen);
      done[i] = end(gen);
    }
    const double last = n(gen);
    const auto got = compute_gae(r, val, done, last, 0.999, 0.95).advantages;
    const auto want = oracle::gae_series(r, val, done, last, 0.999, 0.95);
    for (int i = 0; i < 50; ++i) gae_worst = std::max(gae_worst, std::abs(got[i] - want[i]));
  }
  if (gae_worst > 1e-10) fail(v, fmt("GAE deviation %.3g", gae_worst));
  if (v.pass) v.detail = fmt("%.0f parameters, gradient error %.2g, GAE deviation %.2g", theta.size(), worst, gae_worst);
  return v;
}

// 8. 500k steps on rN0cl.
Verdict desk_learning(PolicyBundle& trained_out) {
  Verdict v;
  const ScenarioSpec s = builtin_scenario("rN0cl");
  const auto seeds = training_eval_seeds(11, 10);
  const PolicyBundle initial = make_policy(s, PpoHyperparams{}, 11);
  PpoAgent untrained(initial, s);
  const double before = evaluate_agent(untrained, s, seeds).mean_cost;
  TrainOptions opt;
  opt.total_steps = 500'000;
  opt.eval_every = 18'000;
  opt.eval_episodes = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult tr = train(s, initial, opt);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  trained_out = tr.best;
  PpoAgent trained(trained_out, s);
  const double after = evaluate_agent(trained, s, seeds).mean_cost;
  Simulator sim(s);
  sim.reset(seeds[0]);
  const double bound = perfect_information_bound(s, sim.realization());
  const double improvement = 1.0 - after / before;
  if (tr.diverged) fail(v, "training diverged: " + tr.failure);
  if (improvement < 0.30) fail(v, fmt("improvement %.1f%% (%.0f -> %.0f)", 100 * improvement, before, after));
  if (after > 1.5 * bound) fail(v, fmt("final cost %.0f is %.2fx the bound %.0f", after, after / bound, bound));
  if (v.pass)
    v.detail = fmt("%.0f -> %.0f", before, after) + fmt(" (%.1f%% better, %.2fx bound", 100 * improvement, after / bound) +
               fmt(" %.0f) in %.1f min", bound, minutes);
  return v;
}

// 9. Untrained policy cost on N20.
Verdict untrained_band() {
  Verdict v;
  const ScenarioSpec s = builtin_scenario("N20");
  const PolicyBundle b = make_policy(s, PpoHyperparams{}, 11);
  PpoAgent agent(b, s);
  const double cost = evaluate_agent(agent, s, training_eval_seeds(11, 10)).mean_cost;
  if (cost < 14e6 || cost > 24e6) fail(v, fmt("untrained mean cost %.0f outside [14M, 24M]", cost));
  if (v.pass) v.detail = fmt("untrained mean cost %.0f", cost);
  return v;
}

// 10. Bootstrap degenerate case and gain arithmetic.
Verdict statistics_checks() {
  Verdict v;
  const Interval ci = bootstrap_ci(std::vector<double>(25, 8.5e6));
  if (ci.low != ci.high || ci.low != 8.5e6) fail(v, fmt("constant-sample interval [%.6g, %.6g]", ci.low, ci.high));
  const Gain g = compute_gain(10'298'000, 9'147'000);
  const double rounded = std::round(g.percent * 10) / 10;
  if (rounded != 11.2) fail(v, fmt("gain %.4f%%", g.percent));
  if (v.pass) v.detail = fmt("zero-width interval at %.0f, gain %.1f%%", ci.low, rounded);
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("CRITERION %d %s: %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  };

  PolicyBundle trained;
  bool have_trained = false;
  report(1, codec_fidelity);
  report(2, codec_round_trip);
  report(3, simulator_invariants);
  report(4, lp_optimality);
  report(5, deterministic_consistency);
  // The bound check runs against the policy trained for criterion 8.
  Verdict learning;
  try {
    learning = desk_learning(trained);
    have_trained = true;
  } catch (const std::exception& e) {
    learning.pass = false;
    learning.detail = std::string("exception: ") + e.what();
  }
  report(6, [&] {
    return bound_dominance(have_trained ? trained : make_policy(builtin_scenario("N20"), PpoHyperparams{}, 11));
  });
  report(7, gradient_check);
  report(8, [&] { return learning; });
  report(9, untrained_band);
  report(10, statistics_checks);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
