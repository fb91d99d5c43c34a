#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridnav/simulator.hpp"

namespace gridnav {

/// Start-position group by x coordinate: center (|x| <= 1), left (x <= -2),
/// right (x >= 2).
std::string group_of(double x);

NoiseParams noise_from(const std::string& name);  // off | low | high

struct ExperimentSpec {
  std::string env;
  WorldModel world;
  std::vector<Pose> starts;
  std::vector<PlannerKind> planners;
  std::vector<std::string> noises;
  int runs_per_start = 5;
  std::uint64_t base_seed = 1;
  double time_limit = 120.0;

  int total_runs() const {
    return static_cast<int>(starts.size()) * runs_per_start *
           static_cast<int>(planners.size()) *
           static_cast<int>(noises.size());
  }
};

ExperimentSpec make_experiment(const std::string& env,
                               std::vector<PlannerKind> planners,
                               std::vector<std::string> noises,
                               int runs_per_start, std::uint64_t base_seed);

struct RunRow {
  std::string env;
  std::string group;
  Pose start;
  PlannerKind planner = PlannerKind::Nbv;
  std::string noise;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Failure;
  double distance = 0.0;
  double sim_time = 0.0;
};

RunConfig config_for_row(const RunRow& row);

/// Executes every run in the spec across `workers` threads. Row order is
/// by run index (planner-major, then noise, start, repeat), independent of
/// the worker count.
std::vector<RunRow> execute(const ExperimentSpec& spec, int workers);

/// CSV with header `env,group,start_x,start_y,start_theta,planner,noise,
/// seed,outcome,distance,sim_time`.
void write_raw_csv(std::ostream& os, const std::vector<RunRow>& rows);
std::vector<RunRow> read_raw_csv(std::istream& is);
std::string format_row(const RunRow& row);
RunRow parse_row(const std::string& line);

struct GroupStats {
  int success = 0;
  int unreachable = 0;
  int failure = 0;
  double mean = 0.0;        // over Success runs; NaN when none
  double half_width = 0.0;  // 1.96 * sd / sqrt(n) over Success runs

  int total() const { return success + unreachable + failure; }
};

/// Distance statistics for one (group, planner, noise) cell of the table.
GroupStats stats_for(const std::vector<RunRow>& rows, const std::string& group,
                     PlannerKind planner, const std::string& noise);

/// Markdown table, one row per (group, planner, noise), with the percent
/// difference of each baseline's mean against the matching nbv cell.
void write_table(std::ostream& os, const std::vector<RunRow>& rows);

/// Assertion file: one assertion per line (# comments allowed), tokens
///   METRIC := (mean|unreach|unreachrate|success) GROUP PLANNER NOISE
///   ASSERT := METRIC OP (NUMBER | [NUMBER *] METRIC)
/// with OP in {<, <=, >, >=, =}. Example:
///   mean right b35 high > 1.10 * mean right nbv high
struct VerifyResult {
  bool passed = true;
  std::string report;  // one PASS/FAIL line per assertion
};
VerifyResult verify(const std::vector<RunRow>& rows, std::istream& assertions);

/// Reruns one config n times and checks that every record is identical.
bool seed_sweep(const RunConfig& config, int n);

}  // namespace gridnav
