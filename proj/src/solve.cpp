#include "tramp/solve.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tramp/io.hpp"

#ifndef TRAMP_TOOLS_DIR
#define TRAMP_TOOLS_DIR "tools"
#endif

namespace tramp {

const char* to_string(Engine e) { return e == Engine::external ? "external" : "builtin_bnb"; }

Engine engine_from_string(const std::string& s) {
  if (s == "builtin" || s == "builtin_bnb") return Engine::builtin_bnb;
  if (s == "external") return Engine::external;
  throw std::invalid_argument("unknown engine '" + s + "'");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::feasible:
      return "feasible";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::time_limit:
      return "time_limit";
    case SolveStatus::error:
      break;
  }
  return "error";
}

void validate(const SolverOptions& options) {
  if (!(options.gap >= 0.0 && options.gap < 1.0)) throw std::invalid_argument("gap must lie in [0, 1)");
  if (!(options.time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
}

void validate(const HeuristicOptions& options) {
  if (!(options.threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
  if (options.max_iteration_times < 1) throw std::invalid_argument("max_iteration_times must be at least 1");
  if (options.step_length < 0) throw std::invalid_argument("step_length must be at least 1");
}

int default_step_length(int num_lanes) { return std::max(1, (3 * num_lanes + 1) / 2); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int count_routes(const InstanceData& inst) {
  std::set<int> used;
  for (const auto& ship : inst.ships) used.insert(ship.sailable_routes.begin(), ship.sailable_routes.end());
  return static_cast<int>(used.size());
}

void fill_plan(SolveResult& res, const ModelSpec& model, const std::vector<double>& x) {
  res.has_plan = true;
  res.plan = plan_from_solution(model, x);
  res.cost = 0.0;
  res.revenue = 0.0;
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const double v = res.plan.get(model.variables[j].ref);
    res.cost += model.variables[j].cost * v;
    res.revenue += model.variables[j].revenue * v;
  }
  res.objective = res.cost - res.revenue;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

std::string external_command(const SolverOptions& o) {
  if (!o.external_command.empty()) return o.external_command;
  if (const char* env = std::getenv("TRAMP_EXTERNAL_SOLVER"); env && *env) return env;
  return "python3 " + shell_quote(std::string(TRAMP_TOOLS_DIR) + "/external_milp.py");
}

struct ExternalOutcome {
  std::string status;
  bool has_solution = false;
  std::vector<double> x;
};

ExternalOutcome run_external(const ModelSpec& model, const SolverOptions& o) {
  static std::atomic<int> counter{0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("tramp_ext_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  const fs::path lp = dir / "model.lp";
  const fs::path sol = dir / "solution.txt";
  write_text_file(lp.string(), write_lp(model));
  std::ostringstream cmd;
  cmd << external_command(o) << ' ' << shell_quote(lp.string()) << ' ' << shell_quote(sol.string())
      << " --gap " << o.gap << " --time-limit " << o.time_limit << " --threads " << o.threads << " --seed "
      << o.seed << " > " << shell_quote((dir / "engine.log").string()) << " 2>&1";
  const int rc = std::system(cmd.str().c_str());
  ExternalOutcome out;
  if (rc != 0 || !fs::exists(sol)) {
    std::string log;
    try {
      log = read_text_file((dir / "engine.log").string());
    } catch (const std::exception&) {
    }
    fs::remove_all(dir);
    throw std::runtime_error("external engine failed (exit " + std::to_string(rc) + "): " + log.substr(0, 400));
  }
  std::unordered_map<std::string, int> pos;
  for (std::size_t j = 0; j < model.variables.size(); ++j) pos.emplace(model.variables[j].ref.name(), static_cast<int>(j));
  out.x.assign(model.variables.size(), 0.0);
  std::istringstream in(read_text_file(sol.string()));
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key >> value;
      if (key == "status") out.status = value;
      continue;
    }
    std::string name;
    double value = 0.0;
    ls >> name >> value;
    auto it = pos.find(name);
    if (it == pos.end()) {
      fs::remove_all(dir);
      throw std::runtime_error("external solution names unknown variable " + name);
    }
    out.x[it->second] = value;
    ++seen;
  }
  out.has_solution = seen > 0;
  fs::remove_all(dir);
  return out;
}

// Trip counts first, then route selection, then transfer structure.
std::vector<int> branching_priority(const ModelSpec& model) {
  std::vector<int> prio(model.variables.size(), 0);
  for (std::size_t j = 0; j < prio.size(); ++j) {
    switch (model.variables[j].ref.kind) {
      case VarKind::x_p1:
      case VarKind::x_p2:
        prio[j] = 2;
        break;
      case VarKind::y1:
      case VarKind::y2:
        prio[j] = 1;
        break;
      default:
        break;
    }
  }
  return prio;
}

void infeasibility_hint(SolveResult& res, const ModelSpec& model, const SolverOptions& o, double remaining) {
  if (model.mode == CiiMode::none || model.options.elastic_cii || remaining <= 0.0) return;
  ModelOptions eo = model.options;
  eo.elastic_cii = true;
  const ModelSpec elastic = build_two_stage_model(model.instance, model.scenarios, model.mode, eo);
  BnbOptions b;
  b.rel_gap = std::max(o.gap, 1e-4);
  b.time_limit = std::min(remaining, std::max(1.0, 0.1 * o.time_limit));
  b.priority = branching_priority(elastic);
  const auto r = solve_milp(to_milp(elastic), b);
  if (!r.has_solution) {
    if (r.status == MilpStatus::infeasible) res.notes.push_back("infeasible even without CII bounds");
    return;
  }
  for (std::size_t j = 0; j < elastic.variables.size(); ++j) {
    const auto& ref = elastic.variables[j].ref;
    if (ref.kind != VarKind::cii_slack || r.x[j] <= 1e-6) continue;
    std::ostringstream os;
    os << "CII bound binds for ship " << ref.v << " in scenario " << ref.s << " (excess " << r.x[j]
       << " t CO2)";
    res.notes.push_back(os.str());
  }
}

}  // namespace

SolveResult solve_exact(const ModelSpec& model, const SolverOptions& options) {
  validate(options);
  const auto t0 = Clock::now();
  SolveResult res;
  res.instance = model.instance;
  res.scenarios = model.scenarios;
  res.mode = model.mode;
  res.routes_considered = count_routes(*model.instance);

  if (options.engine == Engine::builtin_bnb) {
    BnbOptions b;
    b.rel_gap = options.gap;
    b.abs_gap = 1e-6;
    b.time_limit = options.time_limit;
    b.priority = branching_priority(model);
    const BnbResult r = solve_milp(to_milp(model), b);
    res.nodes = r.nodes;
    res.bound = r.bound;
    switch (r.status) {
      case MilpStatus::optimal:
        res.status = SolveStatus::optimal;
        break;
      case MilpStatus::infeasible:
        res.status = SolveStatus::infeasible;
        break;
      case MilpStatus::time_limit:
        res.status = SolveStatus::time_limit;
        break;
      case MilpStatus::node_limit:
        res.status = r.has_solution ? SolveStatus::feasible : SolveStatus::time_limit;
        break;
      default:
        res.status = SolveStatus::error;
        res.notes.push_back(std::string("branch-and-bound ended with ") + to_string(r.status));
        break;
    }
    if (r.has_solution) fill_plan(res, model, r.x);
  } else {
    const ExternalOutcome r = run_external(model, options);
    if (r.status == "optimal") {
      res.status = SolveStatus::optimal;
    } else if (r.status == "infeasible") {
      res.status = SolveStatus::infeasible;
    } else if (r.status == "time_limit") {
      res.status = SolveStatus::time_limit;
    } else if (r.status == "feasible") {
      res.status = SolveStatus::feasible;
    } else {
      res.status = SolveStatus::error;
      res.notes.push_back("external engine status " + r.status);
    }
    if (r.has_solution && res.status != SolveStatus::infeasible) fill_plan(res, model, r.x);
    res.bound = res.objective;
  }
  if (res.status == SolveStatus::infeasible) {
    infeasibility_hint(res, model, options, options.time_limit - seconds_since(t0));
  }
  res.wall_time = seconds_since(t0);
  if (res.has_plan && options.on_result) options.on_result(res, model);
  return res;
}

SolveResult solve_exact(std::shared_ptr<const InstanceData> instance, std::shared_ptr<const ScenarioSet> scenarios,
                        CiiMode mode, const SolverOptions& options) {
  const auto t0 = Clock::now();
  const ModelSpec model = build_two_stage_model(std::move(instance), std::move(scenarios), mode);
  SolveResult res = solve_exact(model, options);
  res.wall_time = seconds_since(t0);
  return res;
}

std::vector<std::size_t> initial_route_positions(const std::vector<std::vector<int>>& sorted_lane_sets,
                                                 int num_lanes) {
  std::vector<char> covered(num_lanes, 0);
  int count = 0;
  std::vector<std::size_t> chosen;
  for (std::size_t p = 0; p < sorted_lane_sets.size(); ++p) {
    if (count == num_lanes) break;
    bool adds = false;
    for (int i : sorted_lane_sets[p]) {
      if (i < 0 || i >= num_lanes) throw std::out_of_range("route names unknown lane " + std::to_string(i));
      adds = adds || !covered[i];
    }
    if (!adds) continue;
    chosen.push_back(p);
    for (int i : sorted_lane_sets[p]) {
      if (!covered[i]) {
        covered[i] = 1;
        ++count;
      }
    }
  }
  for (int i = 0; i < num_lanes; ++i) {
    if (!covered[i]) throw std::invalid_argument("lane " + std::to_string(i) + " is served by no route");
  }
  return chosen;
}

SolveResult heuristic_route_search(std::shared_ptr<const InstanceData> instance,
                                   std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                   const HeuristicOptions& h_options, const SolverOptions& s_options,
                                   HeuristicTrace* trace) {
  validate(h_options);
  validate(s_options);
  const auto t0 = Clock::now();
  const int num_lanes = static_cast<int>(instance->lanes.size());
  const int step = h_options.step_length > 0 ? h_options.step_length : default_step_length(num_lanes);

  // Step 1
  const std::vector<int> sorted = routes_by_ballast_ratio(instance->routes);
  // Step 2
  std::vector<std::vector<int>> lane_sets;
  for (int r : sorted) lane_sets.push_back(instance->routes[r].lane_sequence);
  const auto picked = initial_route_positions(lane_sets, num_lanes);
  std::vector<int> current;
  std::vector<char> taken(sorted.size(), 0);
  for (std::size_t p : picked) {
    current.push_back(sorted[p]);
    taken[p] = 1;
  }
  std::vector<int> remaining;
  for (std::size_t p = 0; p < sorted.size(); ++p) {
    if (!taken[p]) remaining.push_back(sorted[p]);
  }
  if (trace) {
    trace->sorted_routes = sorted;
    trace->initial_set = current;
    trace->iterations.clear();
  }

  auto run_model = [&](const std::vector<int>& routes) {
    const auto it0 = Clock::now();
    auto restricted = std::make_shared<const InstanceData>(restrict_routes(*instance, routes));
    SolverOptions so = s_options;
    so.time_limit = std::max(1e-3, s_options.time_limit - seconds_since(t0));
    SolveResult r = solve_exact(restricted, scenarios, mode, so);
    if (trace) trace->iterations.push_back({routes, r.status, r.objective, seconds_since(it0)});
    return r;
  };
  auto usable = [](const SolveResult& r) { return r.has_plan; };

  // Step 3
  SolveResult best = run_model(current);
  int iteration = 0;
  std::size_t next = 0;
  while (next < remaining.size()) {
    ++iteration;
    const std::size_t end = std::min(remaining.size(), next + static_cast<std::size_t>(step));
    std::vector<int> extended = current;
    extended.insert(extended.end(), remaining.begin() + next, remaining.begin() + end);
    next = end;
    SolveResult r = run_model(extended);
    bool stop = iteration >= h_options.max_iteration_times;
    if (usable(r) && usable(best)) {
      const double change = std::abs(r.objective - best.objective);
      const double scale =
          best.objective != 0.0 ? std::abs(best.objective) : best.cost + best.revenue;
      stop = stop || change < h_options.threshold * scale;
    }
    best = std::move(r);
    current = std::move(extended);
    if (stop) break;
    if (seconds_since(t0) >= s_options.time_limit) {
      best.notes.push_back("heuristic stopped at the time limit");
      break;
    }
  }
  best.routes_considered = static_cast<int>(current.size());
  best.wall_time = seconds_since(t0);
  return best;
}

std::optional<double> normalized_deviation(double cost_h, double revenue_h, double cost_e, double revenue_e) {
  const double denom = cost_e + revenue_e;
  if (denom == 0.0) return std::nullopt;
  return (std::abs(cost_h - cost_e) + std::abs(revenue_h - revenue_e)) / denom;
}

std::optional<double> normalized_deviation(const SolveResult& heuristic, const SolveResult& exact) {
  return normalized_deviation(heuristic.cost, heuristic.revenue, exact.cost, exact.revenue);
}

std::optional<double> objective_ratio_error(double objective_h, double objective_e) {
  if (objective_e == 0.0) return std::nullopt;
  return std::abs(objective_h - objective_e) / std::abs(objective_e);
}

WilcoxonResult wilcoxon_one_sided(const std::vector<double>& deviations, double threshold) {
  struct Item {
    double mag;
    bool positive;
  };
  std::vector<Item> items;
  for (double d : deviations) {
    // Round away representation noise so equal differences tie.
    const double diff = std::round((d - threshold) * 1e12) / 1e12;
    if (diff == 0.0) continue;
    items.push_back({std::abs(diff), diff > 0.0});
  }
  WilcoxonResult res;
  res.n = static_cast<int>(items.size());
  if (items.empty()) {
    res.all_zero = true;
    res.p_value = 1.0;
    return res;
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.mag < b.mag; });
  const int n = res.n;
  std::vector<int> twice_rank(n);  // doubled average ranks stay integral
  double tie_term = 0.0;
  for (int a = 0; a < n;) {
    int b = a;
    while (b + 1 < n && items[b + 1].mag == items[a].mag) ++b;
    const int t = b - a + 1;
    for (int q = a; q <= b; ++q) twice_rank[q] = a + b + 2;
    tie_term += static_cast<double>(t) * t * t - t;
    a = b + 1;
  }
  int w2 = 0;
  for (int q = 0; q < n; ++q) {
    if (items[q].positive) w2 += twice_rank[q];
  }
  res.statistic = w2 / 2.0;
  if (n <= 12) {
    const int total = std::accumulate(twice_rank.begin(), twice_rank.end(), 0);
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    for (int q = 0; q < n; ++q) {
      for (int s = total; s >= twice_rank[q]; --s) ways[s] += ways[s - twice_rank[q]];
    }
    double tail = 0.0;
    for (int s = w2; s <= total; ++s) tail += ways[s];
    res.p_value = tail / std::ldexp(1.0, n);
    res.exact = true;
  } else {
    const double mean = n * (n + 1) / 4.0;
    const double var = n * (n + 1) * (2.0 * n + 1) / 24.0 - tie_term / 48.0;
    const double z = (res.statistic - mean - 0.5) / std::sqrt(var);
    res.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
    res.exact = false;
  }
  return res;
}

}  // namespace tramp
