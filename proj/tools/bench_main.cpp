// Benchmark harness CLI: runs planner experiment grids, verifies metric
// assertions against a produced raw.csv, and replays single runs with trace
// logging.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridnav/bench.hpp"

namespace fs = std::filesystem;
using namespace gridnav;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;

std::vector<PlannerKind> parse_planners(const std::vector<std::string>& ts) {
  std::vector<PlannerKind> out;
  for (const std::string& t : ts) out.push_back(planner_kind_from(t));
  return out;
}

int cmd_run(const std::string& env, std::vector<std::string> planners,
            std::vector<std::string> noises, int runs, std::uint64_t seed,
            const std::string& out_dir, int workers) {
  const ExperimentSpec spec = make_experiment(
      env, parse_planners(planners), std::move(noises), runs, seed);
  const std::vector<RunRow> rows = execute(spec, workers);

  fs::create_directories(out_dir);
  std::ofstream raw(fs::path(out_dir) / "raw.csv");
  std::ofstream table(fs::path(out_dir) / "table.md");
  if (!raw || !table) {
    std::cerr << "error: cannot write to " << out_dir << '\n';
    return kExitConfigError;
  }
  write_raw_csv(raw, rows);
  write_table(table, rows);
  std::cout << rows.size() << " runs -> " << out_dir << "/raw.csv, "
            << out_dir << "/table.md\n";
  return kExitOk;
}

int cmd_verify(const std::string& ref, const std::string& out_dir) {
  std::ifstream raw(fs::path(out_dir) / "raw.csv");
  if (!raw) {
    std::cerr << "error: missing " << out_dir << "/raw.csv\n";
    return kExitConfigError;
  }
  std::ifstream assertions(ref);
  if (!assertions) {
    std::cerr << "error: cannot read " << ref << '\n';
    return kExitConfigError;
  }
  const std::vector<RunRow> rows = read_raw_csv(raw);
  const VerifyResult result = verify(rows, assertions);
  std::cout << result.report;
  return result.passed ? kExitOk : kExitVerifyFailed;
}

int cmd_replay(const std::string& record) {
  RunRow row = parse_row(record);
  RunConfig cfg = config_for_row(row);
  const RunRecord rec = run(cfg);
  std::cout << "outcome " << to_string(rec.outcome) << "\ndistance "
            << rec.distance << "\nsim_time " << rec.sim_time << "\ntrace\n"
            << rec.trace;
  if (rec.outcome != row.outcome) {
    std::cerr << "warning: outcome differs from the recorded row ("
              << to_string(row.outcome) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planner benchmark harness"};
  app.require_subcommand(1);

  std::string env = "open";
  std::vector<std::string> planners{"nbv", "b35", "b7"};
  std::vector<std::string> noises{"low", "high"};
  int runs = 5;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 1;

  CLI::App* run_cmd = app.add_subcommand("run", "execute an experiment grid");
  run_cmd->add_option("--env", env, "environment: open|room")
      ->check(CLI::IsMember({"open", "room"}));
  run_cmd->add_option("--planner", planners, "planners: nbv|b35|b7");
  run_cmd->add_option("--noise", noises, "noise presets: off|low|high");
  run_cmd->add_option("--runs", runs, "runs per start position")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "base seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--workers", workers, "worker thread count")
      ->check(CLI::PositiveNumber);

  std::string ref;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check assertions against raw.csv");
  verify_cmd->add_option("--ref", ref, "assertion file")->required();
  verify_cmd->add_option("--out", out_dir, "directory holding raw.csv");

  std::string record;
  CLI::App* replay_cmd =
      app.add_subcommand("replay", "re-execute one raw.csv row with trace");
  replay_cmd->add_option("--record", record, "one raw.csv data row")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run_cmd->parsed())
      return cmd_run(env, planners, noises, runs, seed, out_dir, workers);
    if (verify_cmd->parsed()) return cmd_verify(ref, out_dir);
    if (replay_cmd->parsed()) return cmd_replay(record);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
