#include "scplan/campaign.hpp"

#include <atomic>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <thread>

#include "scplan/checkpoint.hpp"
#include "scplan/csv.hpp"

namespace scplan {

std::vector<std::uint64_t> default_training_seeds() { return {11, 22, 33, 44, 55}; }

std::string CampaignSpec::check() const {
  if (training_seeds.empty()) return "at least one training seed is required";
  if (std::set<std::uint64_t>(training_seeds.begin(), training_seeds.end()).size() != training_seeds.size())
    return "training seeds must be distinct";
  if (total_steps == 0) return "total_steps must be positive";
  if (eval_every == 0) return "eval_every must be positive";
  if (eval_episodes < 1) return "eval_episodes must be positive";
  if (final_plan.seeds.empty() || final_plan.episodes_per_seed < 1) return "final evaluation plan is empty";
  if (workers < 1) return "workers must be positive";
  if (auto why = hp.check(); !why.empty()) return why;
  return {};
}

Preset parse_preset(const std::string& name) {
  if (name == "desk") return Preset::desk;
  if (name == "paper") return Preset::paper;
  throw std::invalid_argument("unknown preset '" + name + "' (expected desk or paper)");
}

CampaignSpec campaign_preset(Preset preset, const ScenarioSpec& scenario) {
  CampaignSpec spec;
  spec.scenario = scenario;
  if (preset == Preset::desk) {
    spec.training_seeds.resize(1);
    spec.total_steps = 500'000;
  }
  return spec;
}

namespace {

SeedRun train_seed(const CampaignSpec& spec, std::uint64_t seed, const std::vector<std::uint64_t>& episodes) {
  SeedRun run;
  run.seed = seed;
  try {
    TrainOptions opt;
    opt.total_steps = spec.total_steps;
    opt.eval_every = spec.eval_every;
    opt.eval_episodes = spec.eval_episodes;
    if (!spec.out_dir.empty()) {
      run.checkpoint_path = (std::filesystem::path(spec.out_dir) / "checkpoints" /
                             ("seed_" + std::to_string(seed) + ".json")).string();
      opt.checkpoint_path = run.checkpoint_path;
    }
    TrainResult result = train(spec.scenario, make_policy(spec.scenario, spec.hp, seed), opt);
    run.curve = result.curve;
    run.best_training_cost = result.best_cost;
    if (!spec.out_dir.empty())
      write_file_atomic((std::filesystem::path(spec.out_dir) / "curves" /
                         ("learning_curve_seed_" + std::to_string(seed) + ".csv")).string(),
                        learning_curve_csv(run.curve));
    if (result.diverged) {
      run.failure = "training diverged: " + result.failure;
      return run;
    }
    PpoAgent agent(result.best, spec.scenario);
    run.report = evaluate_agent(agent, spec.scenario, episodes);
  } catch (const std::exception& e) {
    run.failure = e.what();
  }
  return run;
}

}  // namespace

CampaignRecord run_campaign(const CampaignSpec& spec) {
  if (auto why = spec.check(); !why.empty()) throw std::invalid_argument(why);
  require_valid(spec.scenario);
  CampaignRecord record;
  record.scenario = spec.scenario.name;
  const auto episodes = episode_seeds(spec.final_plan);

  record.runs.resize(spec.training_seeds.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < spec.training_seeds.size(); i = next++)
      record.runs[i] = train_seed(spec, spec.training_seeds[i], episodes);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(spec.workers), spec.training_seeds.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<EvalReport> trained;
  for (const auto& run : record.runs)
    if (run.report) trained.push_back(*run.report);
  if (!trained.empty()) record.ppo = pool_reports("ppo", trained);

  if (spec.with_baselines) {
    try {
      LpAgent lp(solve_forecast_plan(spec.scenario));
      record.lp = evaluate_agent(lp, spec.scenario, episodes);
      for (std::uint64_t seed : episodes)
        record.bounds.push_back(perfect_information_bound(spec.scenario, EpisodeRealization(spec.scenario, seed)));
    } catch (const std::exception& e) {
      record.lp_failure = e.what();
      record.lp.reset();
      record.bounds.clear();
    }
    if (record.lp && record.ppo) record.comparison = compare_report(record.scenario, *record.lp, *record.ppo, record.bounds);
  }
  if (!spec.out_dir.empty()) write_campaign_reports(record, spec.out_dir);
  return record;
}

void write_campaign_reports(const CampaignRecord& record, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::vector<EvalReport> reports;
  if (record.lp) reports.push_back(*record.lp);
  if (record.ppo) reports.push_back(*record.ppo);
  if (!reports.empty()) {
    write_file_atomic((root / "evaluation.csv").string(), evaluation_csv(reports));
    write_file_atomic((root / "trace.csv").string(), trace_csv(reports));
  }
  if (record.comparison) write_file_atomic((root / "comparison.csv").string(), comparison_csv({*record.comparison}));
  if (!record.bounds.empty() && record.lp) {
    std::vector<std::uint64_t> seeds;
    for (const auto& e : record.lp->episodes) seeds.push_back(e.seed);
    write_file_atomic((root / "bounds.csv").string(), bounds_csv(seeds, record.bounds));
  }
}

}  // namespace scplan
