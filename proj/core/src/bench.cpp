#include "gridnav/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gridnav {

std::string group_of(double x) {
  if (x <= -2.0) return "left";
  if (x >= 2.0) return "right";
  return "center";
}

NoiseParams noise_from(const std::string& name) {
  if (name == "off") return NoiseParams::off();
  if (name == "low") return NoiseParams::low();
  if (name == "high") return NoiseParams::high();
  throw std::invalid_argument("unknown noise preset: " + name);
}

ExperimentSpec make_experiment(const std::string& env,
                               std::vector<PlannerKind> planners,
                               std::vector<std::string> noises,
                               int runs_per_start, std::uint64_t base_seed) {
  if (runs_per_start < 1)
    throw std::invalid_argument("runs_per_start must be >= 1");
  ExperimentSpec spec;
  spec.env = env;
  spec.world = build_environment(env);
  spec.starts = spec.world.starts;
  spec.planners = std::move(planners);
  spec.noises = std::move(noises);
  spec.runs_per_start = runs_per_start;
  spec.base_seed = base_seed;
  for (const std::string& n : spec.noises) noise_from(n);  // validate early
  return spec;
}

RunConfig config_for_row(const RunRow& row) {
  RunConfig cfg;
  cfg.world = build_environment(row.env);
  cfg.start = row.start;
  cfg.goal = cfg.world.goal;
  cfg.planner = row.planner;
  cfg.noise = noise_from(row.noise);
  cfg.seed = row.seed;
  return cfg;
}

std::vector<RunRow> execute(const ExperimentSpec& spec, int workers) {
  std::vector<RunRow> rows;
  for (const PlannerKind planner : spec.planners) {
    for (const std::string& noise : spec.noises) {
      for (const Pose& start : spec.starts) {
        for (int rep = 0; rep < spec.runs_per_start; ++rep) {
          RunRow row;
          row.env = spec.env;
          row.group = group_of(start.x);
          row.start = start;
          row.planner = planner;
          row.noise = noise;
          row.seed = spec.base_seed + rows.size();
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      RunConfig cfg = config_for_row(rows[i]);
      cfg.time_limit = spec.time_limit;
      const RunRecord rec = run(cfg);
      rows[i].outcome = rec.outcome;
      rows[i].distance = rec.distance;
      rows[i].sim_time = rec.sim_time;
    }
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return rows;
}

std::string format_row(const RunRow& row) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6);
  os << row.env << ',' << row.group << ',' << row.start.x << ','
     << row.start.y << ',' << row.start.theta.value_or(0.0) << ','
     << to_string(row.planner) << ',' << row.noise << ',' << row.seed << ','
     << to_string(row.outcome) << ',' << row.distance << ',' << row.sim_time;
  return os.str();
}

RunRow parse_row(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() != 11)
    throw std::invalid_argument("malformed run row: " + line);

  RunRow row;
  row.env = fields[0];
  row.group = fields[1];
  row.start = {std::stod(fields[2]), std::stod(fields[3]),
               std::stod(fields[4])};
  row.planner = planner_kind_from(fields[5]);
  row.noise = fields[6];
  row.seed = std::stoull(fields[7]);
  const std::string& o = fields[8];
  if (o == "success")
    row.outcome = Outcome::Success;
  else if (o == "unreachable")
    row.outcome = Outcome::Unreachable;
  else if (o == "failure")
    row.outcome = Outcome::Failure;
  else
    throw std::invalid_argument("unknown outcome: " + o);
  row.distance = std::stod(fields[9]);
  row.sim_time = std::stod(fields[10]);
  return row;
}

void write_raw_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << "env,group,start_x,start_y,start_theta,planner,noise,seed,outcome,"
        "distance,sim_time\n";
  for (const RunRow& row : rows) os << format_row(row) << '\n';
}

std::vector<RunRow> read_raw_csv(std::istream& is) {
  std::vector<RunRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(parse_row(line));
  }
  return rows;
}

GroupStats stats_for(const std::vector<RunRow>& rows, const std::string& group,
                     PlannerKind planner, const std::string& noise) {
  GroupStats st;
  std::vector<double> distances;
  for (const RunRow& row : rows) {
    if (row.group != group || row.planner != planner || row.noise != noise)
      continue;
    switch (row.outcome) {
      case Outcome::Success:
        ++st.success;
        distances.push_back(row.distance);
        break;
      case Outcome::Unreachable:
        ++st.unreachable;
        break;
      case Outcome::Failure:
        ++st.failure;
        break;
    }
  }
  if (distances.empty()) {
    st.mean = std::numeric_limits<double>::quiet_NaN();
    st.half_width = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  double sum = 0.0;
  for (const double d : distances) sum += d;
  st.mean = sum / distances.size();
  double ss = 0.0;
  for (const double d : distances) ss += (d - st.mean) * (d - st.mean);
  const double n = static_cast<double>(distances.size());
  const double sd = distances.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  st.half_width = 1.96 * sd / std::sqrt(n);
  return st;
}

namespace {

template <typename T>
std::vector<T> distinct(const std::vector<RunRow>& rows,
                        T RunRow::* member) {
  std::vector<T> out;
  for (const RunRow& r : rows)
    if (std::find(out.begin(), out.end(), r.*member) == out.end())
      out.push_back(r.*member);
  return out;
}

std::string fmt(double v, int prec = 2) {
  if (std::isnan(v)) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

}  // namespace

void write_table(std::ostream& os, const std::vector<RunRow>& rows) {
  const auto groups = distinct(rows, &RunRow::group);
  const auto planners = distinct(rows, &RunRow::planner);
  const auto noises = distinct(rows, &RunRow::noise);

  os << "| group | planner | noise | S/U/F | mean (m) | 95% CI | diff vs "
        "nbv |\n";
  os << "|---|---|---|---|---|---|---|\n";
  for (const std::string& group : groups) {
    for (const std::string& noise : noises) {
      const GroupStats ref = stats_for(rows, group, PlannerKind::Nbv, noise);
      for (const PlannerKind planner : planners) {
        const GroupStats st = stats_for(rows, group, planner, noise);
        if (st.total() == 0) continue;
        std::string diff = "-";
        if (planner != PlannerKind::Nbv && !std::isnan(st.mean) &&
            !std::isnan(ref.mean) && ref.mean != 0.0)
          diff = fmt(100.0 * (st.mean - ref.mean) / ref.mean, 1) + "%";
        os << "| " << group << " | " << to_string(planner) << " | " << noise
           << " | " << st.success << "/" << st.unreachable << "/"
           << st.failure << " | " << fmt(st.mean) << " | "
           << (std::isnan(st.half_width) ? "-" : "±" + fmt(st.half_width))
           << " | " << diff << " |\n";
      }
    }
  }
}

namespace {

struct MetricRef {
  std::string metric;  // mean | unreach | unreachrate | success
  std::string group;
  PlannerKind planner;
  std::string noise;
};

double eval_metric(const std::vector<RunRow>& rows, const MetricRef& m) {
  const GroupStats st = stats_for(rows, m.group, m.planner, m.noise);
  if (m.metric == "mean") return st.mean;
  if (m.metric == "unreach") return st.unreachable;
  if (m.metric == "success") return st.success;
  if (m.metric == "unreachrate")
    return st.total() > 0
               ? static_cast<double>(st.unreachable) / st.total()
               : std::numeric_limits<double>::quiet_NaN();
  throw std::invalid_argument("unknown metric: " + m.metric);
}

bool is_metric_name(const std::string& tok) {
  return tok == "mean" || tok == "unreach" || tok == "unreachrate" ||
         tok == "success";
}

MetricRef parse_metric(std::istream& in) {
  MetricRef m;
  std::string planner;
  if (!(in >> m.metric >> m.group >> planner >> m.noise))
    throw std::invalid_argument("truncated metric reference");
  if (!is_metric_name(m.metric))
    throw std::invalid_argument("unknown metric: " + m.metric);
  m.planner = planner_kind_from(planner);
  noise_from(m.noise);
  return m;
}

bool compare(double lhs, const std::string& op, double rhs) {
  if (std::isnan(lhs) || std::isnan(rhs)) return false;
  if (op == "<") return lhs < rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == ">") return lhs > rhs;
  if (op == ">=") return lhs >= rhs;
  if (op == "=") return lhs == rhs;
  throw std::invalid_argument("unknown comparison: " + op);
}

}  // namespace

VerifyResult verify(const std::vector<RunRow>& rows,
                    std::istream& assertions) {
  VerifyResult result;
  std::string line;
  while (std::getline(assertions, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream in(line);
    bool ok = false;
    std::ostringstream detail;
    try {
      const MetricRef lhs = parse_metric(in);
      std::string op;
      if (!(in >> op)) throw std::invalid_argument("missing comparison");

      std::string tok;
      if (!(in >> tok)) throw std::invalid_argument("missing right side");
      double scale = 1.0;
      double rhs;
      if (is_metric_name(tok)) {
        MetricRef m;
        m.metric = tok;
        std::string planner;
        if (!(in >> m.group >> planner >> m.noise))
          throw std::invalid_argument("truncated metric reference");
        m.planner = planner_kind_from(planner);
        noise_from(m.noise);
        rhs = eval_metric(rows, m);
      } else {
        const double number = std::stod(tok);
        std::string star;
        if (in >> star) {
          if (star != "*")
            throw std::invalid_argument("expected '*' after scale");
          scale = number;
          rhs = scale * eval_metric(rows, parse_metric(in));
        } else {
          rhs = number;
        }
      }
      const double left = eval_metric(rows, lhs);
      ok = compare(left, op, rhs);
      detail << " [" << fmt(left, 4) << ' ' << op << ' ' << fmt(rhs, 4)
             << ']';
    } catch (const std::exception& e) {
      ok = false;
      detail << " [error: " << e.what() << ']';
    }
    result.report += (ok ? "PASS: " : "FAIL: ") + line + detail.str() + '\n';
    if (!ok) result.passed = false;
  }
  return result;
}

bool seed_sweep(const RunConfig& config, int n) {
  if (n < 1) return true;
  const RunRecord first = run(config);
  for (int i = 1; i < n; ++i) {
    const RunRecord rec = run(config);
    if (rec.outcome != first.outcome || rec.distance != first.distance ||
        rec.sim_time != first.sim_time || rec.trace != first.trace)
      return false;
  }
  return true;
}

}  // namespace gridnav
