// scplan: scenarios, LP baseline, PPO training, evaluation and reports.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scplan/campaign.hpp"
#include "scplan/checkpoint.hpp"
#include "scplan/csv.hpp"
#include "scplan/lp_agent.hpp"
#include "scplan/lp_model.hpp"
#include "scplan/tuner.hpp"

using namespace scplan;
namespace fs = std::filesystem;

namespace {

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
    std::cerr << "wrote " << path << "\n";
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string millions(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0fk", v / 1000.0);
  return buf;
}

EvalPlan plan_from(const std::vector<std::uint64_t>& seeds, int episodes) {
  EvalPlan plan = default_eval_plan();
  if (!seeds.empty()) plan.seeds = seeds;
  plan.episodes_per_seed = episodes;
  return plan;
}

void print_row(const ComparisonRow& r) {
  std::printf("%-10s bound %s (%s)  lp %s (%s)  ppo %s (%s)  gain %s = %.1f%%\n", r.scenario.c_str(),
              millions(r.bound.mean).c_str(), millions(r.bound.std).c_str(), millions(r.lp.mean).c_str(),
              millions(r.lp.std).c_str(), millions(r.ppo.mean).c_str(), millions(r.ppo.std).c_str(),
              millions(r.gain.value).c_str(), r.gain.percent);
  std::printf("           lp 95%% CI [%s, %s]  ppo 95%% CI [%s, %s]\n", millions(r.lp_ci.low).c_str(),
              millions(r.lp_ci.high).c_str(), millions(r.ppo_ci.low).c_str(), millions(r.ppo_ci.high).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply chain planning with PPO and an LP baseline"};
  app.require_subcommand(1);

  std::string scenario_name = "N20";
  std::string out;
  std::uint64_t seed = 11;
  std::vector<std::uint64_t> seeds;
  std::uint64_t steps = 0;
  std::string preset = "desk";
  int episodes = 10;

  // scenario list|dump
  auto* scenario_cmd = app.add_subcommand("scenario", "Catalog scenarios");
  scenario_cmd->require_subcommand(1);
  auto* list_cmd = scenario_cmd->add_subcommand("list", "Print catalog names");
  auto* dump_cmd = scenario_cmd->add_subcommand("dump", "Write a scenario file");
  dump_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  dump_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* demand_cmd = app.add_subcommand("demand-trace", "Retailer demands of one episode");
  demand_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  demand_cmd->add_option("--seed", seed, "Episode seed");
  demand_cmd->add_option("--out", out, "Output CSV (default stdout)");

  // lp solve|plan|bounds
  auto* lp_cmd = app.add_subcommand("lp", "Forecast LP and perfect-information bounds");
  lp_cmd->require_subcommand(1);
  std::string lp_file;
  auto* solve_cmd = lp_cmd->add_subcommand("solve", "Solve the forecast LP and print its objective");
  solve_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  solve_cmd->add_option("--lp-file", lp_file, "Also export the model in LP format");
  auto* plan_cmd = lp_cmd->add_subcommand("plan", "Export the forecast plan");
  plan_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  plan_cmd->add_option("--out", out, "Output CSV (default stdout)");
  auto* bounds_cmd = lp_cmd->add_subcommand("bounds", "Per-episode perfect-information bounds");
  bounds_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  bounds_cmd->add_option("--seeds", seeds, "Evaluation seeds (default: the fixed ten)");
  bounds_cmd->add_option("--episodes", episodes, "Episodes per seed");
  bounds_cmd->add_option("--out", out, "Output CSV (default stdout)");

  auto* train_cmd = app.add_subcommand("train", "Train PPO on one or more seeds and evaluate");
  int workers = 1;
  bool no_baselines = false;
  train_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  train_cmd->add_option("--preset", preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  train_cmd->add_option("--seeds", seeds, "Training seeds (overrides the preset)");
  train_cmd->add_option("--steps", steps, "Training steps per seed (overrides the preset)");
  train_cmd->add_option("--workers", workers, "Concurrent trainings");
  train_cmd->add_flag("--no-baselines", no_baselines, "Skip the LP agent and the bounds");
  train_cmd->add_option("--out", out, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate checkpoints and the LP agent");
  std::vector<std::string> checkpoints;
  eval_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  eval_cmd->add_option("--checkpoint", checkpoints, "Policy checkpoint(s)");
  eval_cmd->add_option("--seeds", seeds, "Evaluation seeds (default: the fixed ten)");
  eval_cmd->add_option("--episodes", episodes, "Episodes per seed");
  eval_cmd->add_option("--out", out, "Output directory")->required();
  bool episode_trace = false;
  eval_cmd->add_flag("--episode-trace", episode_trace, "Also write per-node traces of the first episode");

  auto* tune_cmd = app.add_subcommand("tune", "Random search with median pruning");
  TuneOptions tune;
  tune_cmd->add_option("--scenario", scenario_name, "Catalog name or scenario file");
  tune_cmd->add_option("--trials", tune.trials, "Number of trials");
  tune_cmd->add_option("--steps", tune.steps_per_trial, "Training steps per trial");
  tune_cmd->add_option("--seed", tune.seed, "Search seed");
  tune_cmd->add_option("--out", out, "Output CSV of trials (default stdout)");

  auto* report_cmd = app.add_subcommand("report", "Comparison table from evaluation directories");
  std::vector<std::string> dirs;
  report_cmd->add_option("dirs", dirs, "Directories holding evaluation.csv and bounds.csv")->required();
  report_cmd->add_option("--out", out, "Output comparison CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd) {
      for (const auto& name : builtin_scenario_names()) std::cout << name << "\n";
    } else if (*dump_cmd) {
      std::ostringstream ss;
      write_scenario(ss, resolve_scenario(scenario_name));
      emit(out, ss.str());
    } else if (*demand_cmd) {
      const ScenarioSpec sc = resolve_scenario(scenario_name);
      emit(out, demand_trace_csv(sc.chain, EpisodeRealization(sc, seed)));
    } else if (*solve_cmd) {
      const ScenarioSpec sc = resolve_scenario(scenario_name);
      const LpInstance inst = build_lp(sc, forecast_scenario(sc));
      if (!lp_file.empty()) {
        std::ostringstream ss;
        inst.problem.write_lp_format(ss);
        emit(lp_file, ss.str());
      }
      const LpResult res = solve_lp(inst.problem);
      std::printf("%s: %s, objective %.6f, %d iterations\n", sc.name.c_str(), lp_status_name(res.status),
                  res.objective, res.iterations);
      return res.status == LpStatus::optimal ? 0 : 2;
    } else if (*plan_cmd) {
      const ScenarioSpec sc = resolve_scenario(scenario_name);
      emit(out, plan_csv(sc.chain, solve_forecast_plan(sc)));
    } else if (*bounds_cmd) {
      const ScenarioSpec sc = resolve_scenario(scenario_name);
      const auto eps = episode_seeds(plan_from(seeds, episodes));
      std::vector<double> bounds;
      for (std::uint64_t s : eps) bounds.push_back(perfect_information_bound(sc, EpisodeRealization(sc, s)));
      emit(out, bounds_csv(eps, bounds));
    } else if (*train_cmd) {
      CampaignSpec spec = campaign_preset(parse_preset(preset), resolve_scenario(scenario_name));
      if (!seeds.empty()) spec.training_seeds = seeds;
      if (steps) spec.total_steps = steps;
      spec.workers = workers;
      spec.with_baselines = !no_baselines;
      spec.out_dir = out;
      const CampaignRecord rec = run_campaign(spec);
      int failures = 0;
      for (const auto& run : rec.runs) {
        if (!run.failure.empty()) {
          ++failures;
          std::printf("seed %llu failed: %s\n", static_cast<unsigned long long>(run.seed), run.failure.c_str());
        } else {
          std::printf("seed %llu: best training evaluation %s, final %s\n", static_cast<unsigned long long>(run.seed),
                      millions(run.best_training_cost).c_str(), millions(run.report->mean_cost).c_str());
        }
      }
      if (!rec.lp_failure.empty()) std::printf("LP baseline failed: %s\n", rec.lp_failure.c_str());
      if (rec.comparison) print_row(*rec.comparison);
      return failures == static_cast<int>(rec.runs.size()) ? 1 : 0;
    } else if (*eval_cmd) {
      const ScenarioSpec sc = resolve_scenario(scenario_name);
      const auto eps = episode_seeds(plan_from(seeds, episodes));
      CampaignRecord rec;
      rec.scenario = sc.name;
      std::vector<EvalReport> trained;
      for (const auto& path : checkpoints) {
        const PolicyBundle bundle = load_checkpoint(path);
        PpoAgent agent(bundle, sc);
        trained.push_back(evaluate_agent(agent, sc, eps));
      }
      if (!trained.empty()) rec.ppo = pool_reports("ppo", trained);
      LpAgent lp(solve_forecast_plan(sc));
      rec.lp = evaluate_agent(lp, sc, eps);
      for (std::uint64_t s : eps) rec.bounds.push_back(perfect_information_bound(sc, EpisodeRealization(sc, s)));
      if (rec.ppo) rec.comparison = compare_report(sc.name, *rec.lp, *rec.ppo, rec.bounds);
      write_campaign_reports(rec, out);
      if (episode_trace) {
        Simulator sim(sc);
        std::vector<StepOutcome> trace;
        run_episode(lp, sim, eps.front(), &trace);
        write_file_atomic((fs::path(out) / "episode_trace_lp.csv").string(), episode_trace_csv(sc.chain, trace));
        for (std::size_t i = 0; i < checkpoints.size(); ++i) {
          const PolicyBundle bundle = load_checkpoint(checkpoints[i]);
          PpoAgent agent(bundle, sc);
          run_episode(agent, sim, eps.front(), &trace);
          write_file_atomic((fs::path(out) / ("episode_trace_ppo" + std::to_string(i) + ".csv")).string(),
                            episode_trace_csv(sc.chain, trace));
        }
      }
      std::printf("lp %s (%s)\n", millions(rec.lp->mean_cost).c_str(), millions(rec.lp->std_cost).c_str());
      if (rec.comparison) print_row(*rec.comparison);
    } else if (*tune_cmd) {
      const TuneResult res = random_search_tune(resolve_scenario(scenario_name), tune);
      std::string csv = "# scplan-tuning v1: trial,best_cost,pruned,evaluations,failure\ntrial,best_cost,pruned,evaluations,failure\n";
      for (const auto& t : res.trials) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", t.best_cost);
        csv += std::to_string(t.index) + ',' + buf + ',' + (t.pruned ? "1" : "0") + ',' +
               std::to_string(t.running_best.size()) + ',' + t.failure + '\n';
      }
      emit(out, csv);
      std::fprintf(stderr, "best trial %d\n", res.best_index);
    } else if (*report_cmd) {
      std::vector<ComparisonRow> rows;
      for (const auto& dir : dirs) {
        const auto reports = parse_evaluation_csv(read_text((fs::path(dir) / "evaluation.csv").string()));
        const EvalReport* lp = nullptr;
        const EvalReport* ppo = nullptr;
        for (const auto& r : reports) (r.agent == "lp" ? lp : ppo) = &r;
        if (!lp || !ppo) throw std::runtime_error(dir + ": evaluation.csv needs both lp and ppo rows");
        std::vector<double> bounds;
        const fs::path bounds_path = fs::path(dir) / "bounds.csv";
        if (fs::exists(bounds_path)) {
          std::istringstream in(read_text(bounds_path.string()));
          std::string line;
          std::getline(in, line);
          std::getline(in, line);
          while (std::getline(in, line))
            if (!line.empty()) bounds.push_back(std::stod(line.substr(line.rfind(',') + 1)));
        }
        rows.push_back(compare_report(fs::path(dir).filename().string(), *lp, *ppo, bounds));
        print_row(rows.back());
      }
      emit(out, comparison_csv(rows));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
