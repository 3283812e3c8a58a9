#include "tramp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tramp {

using nlohmann::json;

void parallel_for(int n, int workers, const std::function<void(int)>& task) {
  if (n <= 0) return;
  workers = std::clamp(workers, 1, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct ShipTotals {
  double spot = 0.0;
  double ballast = 0.0;
  double port = 0.0;
  double speed_distance = 0.0;
  double distance = 0.0;
  double co2 = 0.0;
};

void accumulate_stage(ShipTotals& t, const DeploymentPlan& plan, const InstanceData& inst, int v, int s,
                      double weight) {
  const auto& ship = inst.ships[v];
  const int ne = static_cast<int>(ship.speeds.size());
  for (int r : ship.sailable_routes) {
    for (int e = 0; e < ne; ++e) {
      const double trips = s < 0 ? plan.get(var::x_p1(v, r, e)) : plan.get(var::x_p2(v, r, e, s));
      const double dist = trips * inst.routes[r].total_length;
      t.distance += weight * dist;
      t.speed_distance += weight * dist * ship.speeds[e];
    }
  }
  for (std::size_t i = 0; i < inst.lanes.size(); ++i) {
    for (int k = 0; k < inst.num_types(); ++k) {
      const int ii = static_cast<int>(i);
      t.spot += weight * (s < 0 ? plan.get(var::qSP_p1(v, ii, k)) : plan.get(var::qSP_p2(v, ii, k, s)));
    }
  }
  t.ballast += weight * (s < 0 ? plan.get(var::t_ballast_p1(v)) : plan.get(var::t_ballast_p2(v, s)));
  t.port += weight * (s < 0 ? plan.get(var::t_port_p1(v)) : plan.get(var::t_port_p2(v, s)));
}

}  // namespace

IndicatorReport compute_indicators(const DeploymentPlan& plan, const ModelSpec& model, std::optional<int> scenario) {
  const InstanceData& inst = *model.instance;
  const ScenarioSet& set = *model.scenarios;
  const int ns = static_cast<int>(set.size());
  if (scenario && (*scenario < 0 || *scenario >= ns)) throw std::out_of_range("scenario index out of range");

  IndicatorReport rep;
  rep.scenario = scenario;
  std::vector<std::pair<int, double>> weights;
  if (scenario) {
    weights.emplace_back(*scenario, 1.0);
  } else {
    for (int s = 0; s < ns; ++s) weights.emplace_back(s, set.scenarios[s].probability);
  }

  ShipTotals fleet;
  for (std::size_t vi = 0; vi < inst.ships.size(); ++vi) {
    const int v = static_cast<int>(vi);
    ShipTotals t;
    accumulate_stage(t, plan, inst, v, -1, 1.0);
    for (const auto& [s, w] : weights) {
      accumulate_stage(t, plan, inst, v, s, w);
      t.co2 += w * cii_breakdown(plan, inst, v, s).emissions;
    }
    ShipIndicators si;
    si.ship = v;
    si.cargo_quant = t.spot;
    si.ballast_days = t.ballast;
    si.port_days = t.port;
    const double idle = t.ballast + t.port;
    if (idle > 0.0) {
      si.ballast_ratio = t.ballast / idle;
    } else {
      si.no_idle_time = true;
      rep.flags.push_back("ship " + std::to_string(v) + " has no idle time; ballast ratio set to 0");
    }
    si.avg_speed = t.distance > 0.0 ? t.speed_distance / t.distance : 0.0;
    si.co2_emission = t.co2;
    rep.ships.push_back(si);

    fleet.spot += t.spot;
    fleet.ballast += t.ballast;
    fleet.port += t.port;
    fleet.distance += t.distance;
    fleet.speed_distance += t.speed_distance;
    fleet.co2 += t.co2;
  }
  rep.cargo_quant = fleet.spot;
  rep.ballast_ratio = fleet.ballast + fleet.port > 0.0 ? fleet.ballast / (fleet.ballast + fleet.port) : 0.0;
  rep.avg_speed = fleet.distance > 0.0 ? fleet.speed_distance / fleet.distance : 0.0;
  rep.co2_emission = fleet.co2;

  double objective = 0.0;
  for (const auto& mv : model.variables) {
    const double value = plan.get(mv.ref);
    if (value == 0.0) continue;
    if (mv.ref.s < 0 || !scenario) {
      objective += mv.objective() * value;
    } else if (mv.ref.s == *scenario) {
      const double p = set.scenarios[*scenario].probability;
      if (p <= 0.0) {
        rep.flags.push_back("scenario has zero probability; its costs are not recoverable");
        continue;
      }
      objective += mv.objective() / p * value;
    }
  }
  rep.total_profit = -objective;
  return rep;
}

IndicatorReport compute_indicators(const SolveResult& result, std::optional<int> scenario) {
  if (!result.has_plan) throw std::invalid_argument("result carries no plan");
  const ModelSpec model = build_two_stage_model(result.instance, result.scenarios, result.mode);
  return compute_indicators(result.plan, model, scenario);
}

json to_json(const IndicatorReport& report) {
  json ships = json::array();
  for (const auto& s : report.ships) {
    ships.push_back({{"ship", s.ship},
                     {"cargo_quant", s.cargo_quant},
                     {"ballast_days", s.ballast_days},
                     {"port_days", s.port_days},
                     {"ballast_ratio", s.ballast_ratio},
                     {"avg_speed", s.avg_speed},
                     {"co2_emission", s.co2_emission},
                     {"no_idle_time", s.no_idle_time}});
  }
  return {{"scenario", report.scenario ? json(*report.scenario) : json("expectation")},
          {"cargo_quant", report.cargo_quant},
          {"ballast_ratio", report.ballast_ratio},
          {"avg_speed", report.avg_speed},
          {"co2_emission", report.co2_emission},
          {"total_profit", report.total_profit},
          {"ships", ships},
          {"flags", report.flags}};
}

double ParadoxInputs::baseline_cii() const {
  if (cii0 > 0.0) return cii0;
  return m0 / (capacity * d0);
}

std::array<bool, 4> check_paradox_assumptions(const ParadoxInputs& in) {
  std::array<bool, 4> ok{};
  ok[0] = in.eps_laden > in.eps_ballast && in.eps_ballast > 0.0 && in.eps_port >= 0.0;
  ok[1] = in.speed > 0.0 && in.eps_ballast > in.eps_port / in.speed;
  ok[2] = in.fixed_laden_task;
  ok[3] = in.capacity * in.target_cii() >= in.eps_ballast;
  return ok;
}

ParadoxDelta paradox_delta(const ParadoxInputs& in) {
  if (!(in.p > 0.0 && in.p < 1.0)) throw std::domain_error("tightening fraction p must lie in (0, 1)");
  if (!(in.m0 > 0.0 && in.d0 > 0.0)) throw std::domain_error("baseline emissions and distance must be positive");
  if (!(in.speed > 0.0)) throw std::domain_error("speed must be positive");
  const auto ok = check_paradox_assumptions(in);
  if (!ok[0]) throw std::domain_error("A1 violated: need eps_laden > eps_ballast > 0");
  if (!ok[1]) throw std::domain_error("A2 violated: need eps_ballast > eps_port / speed");
  if (!ok[2]) throw std::domain_error("A3 violated: laden task is not fixed");
  const double net = in.eps_ballast - in.eps_port / in.speed;
  const double denom = (1.0 - in.p) * in.m0 / in.d0 - net;
  if (!(denom > 0.0)) throw std::domain_error("A4 violated: tightened standard is below the ballast intensity");
  ParadoxDelta out;
  out.delta_distance = in.p * in.m0 / denom;
  out.emission_increase = net * out.delta_distance;
  return out;
}

double paradox_adjusted_cii(const ParadoxInputs& in, double delta) {
  const double m = in.m0 + (in.eps_ballast - in.eps_port / in.speed) * delta;
  return m / (in.capacity * (in.d0 + delta));
}

const ParadoxCell& ParadoxReport::cell(std::size_t level, std::size_t standard) const {
  return cells.at(level * standards.size() + standard);
}

int ParadoxReport::paradox_count() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const ParadoxCell& c) { return c.paradox; }));
}

InstanceData scale_emissions(const InstanceData& instance, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("emission level must be positive");
  InstanceData out = instance;
  for (auto& ship : out.ships) {
    ship.ballast_emission_rate *= level;
    ship.port_emission_rate *= level;
  }
  for (auto& vp : out.voyage_profiles) vp.round_trip_emissions *= level;
  for (auto& tp : out.transfer_profiles) tp.transfer_emissions *= level;
  out.index_profiles();
  return out;
}

InstanceData with_cii_standard(const InstanceData& instance, double standard) {
  if (!(standard > 0.0)) throw std::invalid_argument("CII standard must be positive");
  InstanceData out = instance;
  for (auto& ship : out.ships) ship.cii_standard = standard;
  out.index_profiles();
  return out;
}

ParadoxReport run_paradox_experiment(const InstanceData& instance, const ScenarioSet& scenarios,
                                     const std::vector<double>& standards,
                                     const std::vector<double>& emission_levels, const ParadoxOptions& options) {
  if (standards.empty() || emission_levels.empty()) throw std::invalid_argument("empty paradox grid");
  ParadoxReport rep;
  rep.standards = standards;
  rep.emission_levels = emission_levels;
  const std::size_t nstd = standards.size();
  rep.cells.resize(nstd * emission_levels.size());
  auto set = std::make_shared<const ScenarioSet>(scenarios);

  parallel_for(static_cast<int>(rep.cells.size()), options.workers, [&](int idx) {
    ParadoxCell& cell = rep.cells[idx];
    cell.emission_level = emission_levels[idx / nstd];
    cell.standard = standards[idx % nstd];
    auto inst = std::make_shared<const InstanceData>(
        with_cii_standard(scale_emissions(instance, cell.emission_level), cell.standard));
    SolveResult res = options.heuristic
                          ? heuristic_route_search(inst, set, CiiMode::supply_based, options.heuristic_options,
                                                   options.solver)
                          : solve_exact(inst, set, CiiMode::supply_based, options.solver);
    cell.status = res.status;
    cell.feasible = res.has_plan;
    if (!res.has_plan) return;
    const IndicatorReport ind = compute_indicators(res);
    cell.total_profit = -res.objective;
    cell.co2_emission = ind.co2_emission;
    for (const auto& s : ind.ships) cell.ballast_days += s.ballast_days;
  });

  for (std::size_t l = 0; l < emission_levels.size(); ++l) {
    for (std::size_t a = 0; a < nstd; ++a) {
      ParadoxCell& strict = rep.cells[l * nstd + a];
      if (!strict.feasible) continue;
      for (std::size_t b = 0; b < nstd; ++b) {
        const ParadoxCell& loose = rep.cells[l * nstd + b];
        if (!loose.feasible || !(loose.standard > strict.standard)) continue;
        if (strict.co2_emission > loose.co2_emission * (1.0 + rep.flag_threshold)) {
          strict.paradox = true;
          strict.emission_increase = std::max(strict.emission_increase, strict.co2_emission - loose.co2_emission);
        }
      }
    }
  }
  return rep;
}

json to_json(const ParadoxReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"standard", c.standard},
                     {"emission_level", c.emission_level},
                     {"status", to_string(c.status)},
                     {"feasible", c.feasible},
                     {"total_profit", c.total_profit},
                     {"co2_emission", c.co2_emission},
                     {"ballast_days", c.ballast_days},
                     {"paradox", c.paradox},
                     {"emission_increase", c.emission_increase}});
  }
  return {{"standards", report.standards},
          {"emission_levels", report.emission_levels},
          {"flag_threshold", report.flag_threshold},
          {"paradox_count", report.paradox_count()},
          {"cells", cells}};
}

std::string paradox_csv(const ParadoxReport& report) {
  std::ostringstream os;
  os << "standard,emission_level,status,feasible,total_profit,co2_emission,ballast_days,paradox,emission_increase\n";
  for (const auto& c : report.cells) {
    os << num(c.standard) << ',' << num(c.emission_level) << ',' << to_string(c.status) << ',' << c.feasible << ','
       << num(c.total_profit) << ',' << num(c.co2_emission) << ',' << num(c.ballast_days) << ',' << c.paradox
       << ',' << num(c.emission_increase) << '\n';
  }
  return os.str();
}

InfoValueReport compute_value_of_information(std::shared_ptr<const InstanceData> instance,
                                             std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                             const SolverOptions& options, int workers) {
  validate(options);
  InfoValueReport rep;
  const int ns = static_cast<int>(scenarios->size());
  rep.scenario_count = ns;
  for (const auto& s : scenarios->scenarios) rep.probabilities.push_back(s.probability);

  const SolveResult rp = solve_exact(instance, scenarios, mode, options);
  rep.rp_status = rp.status;
  if (!rp.has_plan) {
    throw std::runtime_error(std::string("recourse problem has no solution (") + to_string(rp.status) + ")");
  }
  rep.rp = -rp.objective;

  if (ns == 1) {
    rep.ws = rep.rp;
    rep.ems = rep.rp;
    rep.evpi = 0.0;
    rep.vss = 0.0;
    rep.ws_by_scenario = {rep.rp};
    rep.ems_by_scenario = {rep.rp};
    rep.ems_cii_relaxed = {false};
    rep.ems_infeasible = {false};
    rep.gap_slack = 2.0 * (options.gap * std::max(1.0, std::abs(rep.rp)) + 1e-6);
    rep.notes.push_back("single scenario: perfect information and the mean value add nothing");
    return rep;
  }

  rep.ws_by_scenario.assign(ns, 0.0);
  std::vector<SolveStatus> ws_status(ns, SolveStatus::error);
  parallel_for(ns, workers, [&](int s) {
    auto single = std::make_shared<const ScenarioSet>(single_scenario_set(*scenarios, s));
    const SolveResult r = solve_exact(instance, single, mode, options);
    ws_status[s] = r.status;
    if (r.has_plan) rep.ws_by_scenario[s] = -r.objective;
  });
  for (int s = 0; s < ns; ++s) {
    if (ws_status[s] != SolveStatus::optimal && ws_status[s] != SolveStatus::feasible) {
      rep.notes.push_back("wait-and-see subproblem " + std::to_string(s) + " ended " + to_string(ws_status[s]));
    }
    rep.ws += rep.probabilities[s] * rep.ws_by_scenario[s];
  }
  rep.evpi = rep.ws - rep.rp;

  auto mean_set = std::make_shared<const ScenarioSet>(
      single_scenario_set(mean_scenario(*scenarios), scenarios->instance_hash));
  const SolveResult mv = solve_exact(instance, mean_set, mode, options);
  rep.ems_by_scenario.assign(ns, 0.0);
  rep.ems_cii_relaxed.assign(ns, false);
  rep.ems_infeasible.assign(ns, false);
  if (!mv.has_plan) {
    rep.mean_value_infeasible = true;
    rep.notes.push_back(std::string("mean-value problem has no solution (") + to_string(mv.status) +
                        "); EMS and VSS undefined");
  } else {
    parallel_for(ns, workers, [&](int s) {
      ModelOptions eo;
      eo.elastic_cii = true;
      auto single = std::make_shared<const ScenarioSet>(single_scenario_set(*scenarios, s));
      ModelSpec model = build_two_stage_model(instance, single, mode, eo);
      fix_first_stage(model, mv.plan);
      const SolveResult r = solve_exact(model, options);
      if (!r.has_plan) {
        rep.ems_infeasible[s] = true;
        return;
      }
      rep.ems_by_scenario[s] = -r.objective;
      for (const auto& [ref, value] : r.plan.values) {
        if (ref.kind == VarKind::cii_slack && value > 1e-6) rep.ems_cii_relaxed[s] = true;
      }
    });
    bool all = true;
    double ems = 0.0;
    for (int s = 0; s < ns; ++s) {
      if (rep.ems_infeasible[s]) {
        all = false;
        rep.notes.push_back("mean-value plan leaves scenario " + std::to_string(s) + " without a recourse");
      }
      if (rep.ems_cii_relaxed[s]) {
        rep.notes.push_back("mean-value plan breaks a CII bound in scenario " + std::to_string(s) +
                            "; penalized slack used");
      }
      ems += rep.probabilities[s] * rep.ems_by_scenario[s];
    }
    if (all) {
      rep.ems = ems;
      rep.vss = rep.rp - ems;
    }
  }
  double scale = std::max({1.0, std::abs(rep.rp), std::abs(rep.ws)});
  if (rep.ems) scale = std::max(scale, std::abs(*rep.ems));
  rep.gap_slack = 2.0 * (options.gap * scale + 1e-6);
  return rep;
}

json to_json(const InfoValueReport& report) {
  return {{"scenario_count", report.scenario_count},
          {"rp_status", to_string(report.rp_status)},
          {"rp", report.rp},
          {"ws", report.ws},
          {"ems", opt_json(report.ems)},
          {"evpi", opt_json(report.evpi)},
          {"vss", opt_json(report.vss)},
          {"gap_slack", report.gap_slack},
          {"mean_value_infeasible", report.mean_value_infeasible},
          {"probabilities", report.probabilities},
          {"ws_by_scenario", report.ws_by_scenario},
          {"ems_by_scenario", report.ems_by_scenario},
          {"ems_cii_relaxed", report.ems_cii_relaxed},
          {"ems_infeasible", report.ems_infeasible},
          {"notes", report.notes}};
}

std::string voi_csv(const InfoValueReport& report) {
  std::ostringstream os;
  os << "scenario,probability,ws_profit,ems_profit,ems_cii_relaxed,ems_infeasible\n";
  for (std::size_t s = 0; s < report.ws_by_scenario.size(); ++s) {
    os << s << ',' << num(report.probabilities[s]) << ',' << num(report.ws_by_scenario[s]) << ','
       << num(report.ems_by_scenario[s]) << ',' << report.ems_cii_relaxed[s] << ',' << report.ems_infeasible[s]
       << '\n';
  }
  return os.str();
}

std::uint64_t benchmark_seed(std::uint64_t base, int lanes, int rep) {
  return base * 1000003ULL + static_cast<std::uint64_t>(lanes) * 1000ULL + static_cast<std::uint64_t>(rep);
}

ScenarioSet truncate_scenarios(const ScenarioSet& set, int n) {
  if (n <= 0 || n >= static_cast<int>(set.size())) return set;
  ScenarioSet out = set;
  out.scenarios.resize(n);
  double total = 0.0;
  for (const auto& s : out.scenarios) total += s.probability;
  if (!(total > 0.0)) throw std::invalid_argument("truncated scenarios carry no probability");
  for (auto& s : out.scenarios) s.probability /= total;
  return out;
}

BenchmarkReport run_heuristic_benchmark(const BenchmarkOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("reps must be at least 1");
  BenchmarkReport rep;
  rep.threshold = options.threshold;
  rep.alpha = options.alpha;
  for (int n : options.lane_counts) {
    if (n < 1) throw std::invalid_argument("lane counts must be positive");
    for (int r = 0; r < options.reps; ++r) {
      BenchmarkCase c;
      c.lanes = n;
      c.seed = benchmark_seed(options.seed, n, r);
      rep.cases.push_back(c);
    }
  }
  parallel_for(static_cast<int>(rep.cases.size()), options.workers, [&](int idx) {
    BenchmarkCase& c = rep.cases[idx];
    GenerationDims dims = options.dims;
    dims.lanes = c.lanes;
    auto inst = std::make_shared<const InstanceData>(generate_instance(c.seed, dims, options.ranges));
    auto set = std::make_shared<const ScenarioSet>(
        truncate_scenarios(build_base_scenarios(*inst), options.base_scenarios));
    const SolveResult exact = solve_exact(inst, set, options.mode, options.solver);
    const SolveResult heur = heuristic_route_search(inst, set, options.mode, options.heuristic, options.solver);
    c.exact_status = exact.status;
    c.heuristic_status = heur.status;
    c.exact_cost = exact.cost;
    c.exact_revenue = exact.revenue;
    c.heuristic_cost = heur.cost;
    c.heuristic_revenue = heur.revenue;
    c.exact_time = exact.wall_time;
    c.heuristic_time = heur.wall_time;
    c.exact_routes = exact.routes_considered;
    c.heuristic_routes = heur.routes_considered;
    if (exact.has_plan && heur.has_plan) {
      c.deviation = normalized_deviation(heur, exact);
      c.ratio_error = objective_ratio_error(heur.objective, exact.objective);
    }
  });
  for (int n : options.lane_counts) {
    BenchmarkRow row;
    row.lanes = n;
    int count = 0;
    for (const auto& c : rep.cases) {
      if (c.lanes != n) continue;
      ++count;
      row.mean_exact_time += c.exact_time;
      row.mean_heuristic_time += c.heuristic_time;
      if (c.deviation) row.deviations.push_back(*c.deviation);
    }
    row.mean_exact_time /= count;
    row.mean_heuristic_time /= count;
    row.wilcoxon = wilcoxon_one_sided(row.deviations, options.threshold);
    row.rejected = !row.deviations.empty() && row.wilcoxon.p_value < options.alpha;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

json to_json(const BenchmarkReport& report, bool include_timing) {
  json cases = json::array();
  for (const auto& c : report.cases) {
    json row = {{"lanes", c.lanes},
                {"seed", c.seed},
                {"exact_status", to_string(c.exact_status)},
                {"heuristic_status", to_string(c.heuristic_status)},
                {"exact_cost", c.exact_cost},
                {"exact_revenue", c.exact_revenue},
                {"heuristic_cost", c.heuristic_cost},
                {"heuristic_revenue", c.heuristic_revenue},
                {"exact_routes", c.exact_routes},
                {"heuristic_routes", c.heuristic_routes},
                {"deviation", opt_json(c.deviation)},
                {"ratio_error", opt_json(c.ratio_error)}};
    if (include_timing) {
      row["exact_time"] = c.exact_time;
      row["heuristic_time"] = c.heuristic_time;
    }
    cases.push_back(std::move(row));
  }
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row = {{"lanes", r.lanes},
                {"n", static_cast<int>(r.deviations.size())},
                {"deviations", r.deviations},
                {"w_plus", r.wilcoxon.statistic},
                {"p_value", r.wilcoxon.p_value},
                {"exact_distribution", r.wilcoxon.exact},
                {"rejected", r.rejected}};
    if (include_timing) {
      row["mean_exact_time"] = r.mean_exact_time;
      row["mean_heuristic_time"] = r.mean_heuristic_time;
    }
    rows.push_back(std::move(row));
  }
  return {{"threshold", report.threshold}, {"alpha", report.alpha}, {"cases", cases}, {"wilcoxon", rows}};
}

std::string benchmark_csv(const BenchmarkReport& report, bool include_timing) {
  std::ostringstream os;
  os << "lanes,seed,exact_status,heuristic_status,exact_cost,exact_revenue,heuristic_cost,heuristic_revenue,"
     << (include_timing ? "exact_time,heuristic_time," : "") << "exact_routes,heuristic_routes,deviation,ratio_error\n";
  for (const auto& c : report.cases) {
    os << c.lanes << ',' << c.seed << ',' << to_string(c.exact_status) << ',' << to_string(c.heuristic_status)
       << ',' << num(c.exact_cost) << ',' << num(c.exact_revenue) << ',' << num(c.heuristic_cost) << ','
       << num(c.heuristic_revenue) << ',';
    if (include_timing) os << num(c.exact_time) << ',' << num(c.heuristic_time) << ',';
    os << c.exact_routes << ',' << c.heuristic_routes << ',' << (c.deviation ? num(*c.deviation) : "") << ','
       << (c.ratio_error ? num(*c.ratio_error) : "") << '\n';
  }
  return os.str();
}

std::string wilcoxon_csv(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "lanes,n,w_plus,p_value,exact_distribution,rejected\n";
  for (const auto& r : report.rows) {
    os << r.lanes << ',' << r.deviations.size() << ',' << num(r.wilcoxon.statistic) << ',' << num(r.wilcoxon.p_value)
       << ',' << r.wilcoxon.exact << ',' << r.rejected << '\n';
  }
  return os.str();
}

}  // namespace tramp
