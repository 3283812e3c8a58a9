#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "tramp/analysis.hpp"
#include "tramp/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tramp;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kNoIncumbent = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = ".";
  std::uint64_t seed = 0;
  int workers = 1;
};

struct SolverFlags {
  std::string engine = "builtin";
  double gap = 1e-6;
  double time_limit = 600.0;
  int threads = 1;
  bool heuristic = false;
  double threshold = 0.05;
  int step_length = 0;
  int max_iters = 3;

  SolverOptions solver(std::uint64_t seed) const {
    SolverOptions o;
    o.engine = engine_from_string(engine);
    o.gap = gap;
    o.time_limit = time_limit;
    o.threads = threads;
    o.seed = seed;
    validate(o);
    return o;
  }
  HeuristicOptions heuristic_options() const {
    HeuristicOptions h;
    h.threshold = threshold;
    h.step_length = step_length;
    h.max_iteration_times = max_iters;
    validate(h);
    return h;
  }
  json to_json() const {
    return {{"engine", engine},         {"gap", gap},           {"time_limit", time_limit},
            {"threads", threads},       {"heuristic", heuristic}, {"threshold", threshold},
            {"step_length", step_length}, {"max_iters", max_iters}};
  }
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--engine", f.engine, "builtin or external")->check(CLI::IsMember({"builtin", "builtin_bnb", "external"}));
  app->add_option("--gap", f.gap, "relative optimality gap");
  app->add_option("--time-limit", f.time_limit, "seconds per solve");
  app->add_option("--threads", f.threads, "thread hint for the external engine");
  app->add_flag("--heuristic", f.heuristic, "route-search heuristic instead of the full model");
  app->add_option("--threshold", f.threshold, "heuristic stopping threshold");
  app->add_option("--step-length", f.step_length, "routes added per heuristic iteration (0 = ceil(1.5 N))");
  app->add_option("--max-iters", f.max_iters, "heuristic iteration cap");
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--workers", c.workers, "parallel solves")->check(CLI::PositiveNumber);
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir);
  return fs::path(dir);
}

std::string csv_with_header(const json& meta, const std::string& body) {
  return "# " + meta.dump() + "\n" + body;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

ScenarioSet scenarios_of_size(const InstanceData& inst, int count, std::uint64_t seed) {
  if (count < 13 || count % 13 != 0) throw UsageError("scenario count must be a multiple of 13");
  ScenarioSet base = build_base_scenarios(inst);
  if (count == 13) return base;
  return expand_scenarios(base, count / 13 - 1, 0.15, seed);
}

struct Inputs {
  std::shared_ptr<const InstanceData> instance;
  std::shared_ptr<const ScenarioSet> scenarios;
  json meta;
};

Inputs load_inputs(const std::string& instance_path, const std::string& scenario_path, int scenario_count,
                   std::uint64_t seed) {
  Inputs in;
  auto inst = std::make_shared<InstanceData>(instance_from_json(read_json_file(instance_path)));
  in.instance = inst;
  const auto problems = validate_instance(*inst);
  if (!problems.empty()) {
    throw std::runtime_error("invalid instance: " + problems.front().field + " " + problems.front().rule);
  }
  if (!scenario_path.empty()) {
    in.scenarios = std::make_shared<ScenarioSet>(scenarios_from_json(read_json_file(scenario_path)));
  } else {
    in.scenarios = std::make_shared<ScenarioSet>(scenarios_of_size(*inst, scenario_count, seed));
  }
  const auto bad = check_scenarios(*inst, *in.scenarios);
  if (!bad.empty()) throw std::runtime_error("scenarios do not fit the instance: " + bad.front());
  in.meta = {{"instance", {{"path", instance_path}, {"hash", content_hash(*inst)}}},
             {"scenarios",
              {{"path", scenario_path.empty() ? json(nullptr) : json(scenario_path)},
               {"count", in.scenarios->size()},
               {"hash", content_hash(*in.scenarios)}}}};
  return in;
}

json config_block(const std::string& command, const Common& c, json args, const json& inputs) {
  return {{"command", command}, {"seed", c.seed}, {"args", std::move(args)}, {"inputs", inputs},
          {"schema_version", kSchemaVersion}};
}

int exit_for(SolveStatus s, bool has_plan) {
  if (s == SolveStatus::infeasible) return kInfeasible;
  if (!has_plan) return kNoIncumbent;
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  Common c;
  GenerationDims dims;
  int scenarios = 13;
};

int cmd_generate(const GenerateArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  const InstanceData inst = generate_instance(a.c.seed, a.dims);
  const ScenarioSet set = scenarios_of_size(inst, a.scenarios, a.c.seed);
  write_json_file((dir / "instance.json").string(), instance_to_json(inst));
  write_json_file((dir / "scenarios.json").string(), scenarios_to_json(set));

  std::vector<int> lane_routes(inst.lanes.size(), 0);
  for (const auto& r : inst.routes) {
    for (int i : r.lane_sequence) ++lane_routes[i];
  }
  json args = {{"ships", a.dims.ships},       {"lanes", a.dims.lanes},   {"contracts", a.dims.contracts},
               {"types", a.dims.capacity_types}, {"speeds", a.dims.speeds}, {"cmax", a.dims.c_max},
               {"max_routes", a.dims.max_routes}, {"max_route_length", a.dims.max_route_length},
               {"scenarios", a.scenarios}};
  json summary = {{"config", config_block("generate", a.c, args, json::object())},
                  {"instance_hash", content_hash(inst)},
                  {"scenario_hash", content_hash(set)},
                  {"ships", inst.ships.size()},
                  {"lanes", inst.lanes.size()},
                  {"routes_enumerated", enumerate_routes(inst.lanes, a.dims.c_max > 0 ? a.dims.c_max : a.dims.lanes).size()},
                  {"routes", inst.routes.size()},
                  {"routes_per_lane", lane_routes},
                  {"scenario_count", set.size()},
                  {"fleet_capacity_covers_demand", inst.fleet_capacity_covers_demand}};
  write_json_file((dir / "generate.json").string(), summary);

  const int c_max = a.dims.c_max > 0 ? a.dims.c_max : a.dims.lanes;
  const std::size_t enumerated = enumerate_routes(inst.lanes, c_max).size();
  std::cout << "routes " << enumerated << " enumerated, " << inst.routes.size() << " kept (length cap "
            << a.dims.max_route_length << " nmile)\n";
  for (std::size_t i = 0; i < lane_routes.size(); ++i) {
    std::cout << "lane " << i << " covered by " << lane_routes[i] << " routes\n";
  }
  std::cout << "ships " << inst.ships.size() << ", scenarios " << set.size() << ", written to " << dir.string()
            << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  Common c;
  SolverFlags f;
  std::string instance, scenarios, cii = "none";
  int scenario_count = 13;
};

int cmd_solve(const SolveArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  const Inputs in = load_inputs(a.instance, a.scenarios, a.scenario_count, a.c.seed);
  const CiiMode mode = cii_mode_from_string(a.cii);
  const SolverOptions so = a.f.solver(a.c.seed);

  HeuristicTrace trace;
  SolveResult res = a.f.heuristic
                        ? heuristic_route_search(in.instance, in.scenarios, mode, a.f.heuristic_options(), so, &trace)
                        : solve_exact(in.instance, in.scenarios, mode, so);

  json args = a.f.to_json();
  args["cii"] = to_string(mode);
  const json config = config_block("solve", a.c, args, in.meta);
  json out = {{"config", config},
              {"status", to_string(res.status)},
              {"has_plan", res.has_plan},
              {"notes", res.notes},
              {"routes_considered", res.routes_considered}};
  if (res.has_plan) {
    out["objective"] = res.objective;
    out["cost"] = res.cost;
    out["revenue"] = res.revenue;
    const ModelSpec full = build_two_stage_model(in.instance, in.scenarios, mode);
    json viol = json::array();
    for (const auto& v : check_plan_feasibility(res.plan, full)) {
      viol.push_back({{"constraint", v.constraint}, {"residual", v.residual}});
    }
    out["feasibility_violations"] = viol;
    json cii = json::array();
    for (std::size_t s = 0; s < in.scenarios->size(); ++s) {
      json row = json::array();
      for (const auto& v : cii_value(res.plan, *in.instance, mode, static_cast<int>(s))) {
        row.push_back(v ? json(*v) : json(nullptr));
      }
      cii.push_back(row);
    }
    out["cii_by_scenario"] = cii;
    out["indicators"] = to_json(compute_indicators(res.plan, full));

    json plan = json::object();
    for (const auto& [ref, value] : res.plan.values) {
      if (value != 0.0) plan[ref.name()] = value;
    }
    write_json_file((dir / "plan.json").string(), {{"config", config}, {"values", plan}});
  }
  if (a.f.heuristic) {
    json iters = json::array();
    for (const auto& it : trace.iterations) {
      iters.push_back({{"routes", it.routes}, {"status", to_string(it.status)}, {"objective", it.objective}});
    }
    out["heuristic"] = {{"sorted_routes", trace.sorted_routes}, {"initial_set", trace.initial_set},
                        {"iterations", iters}};
  }
  write_json_file((dir / "result.json").string(), out);
  write_json_file((dir / "timing.json").string(),
                  {{"wall_time", res.wall_time}, {"nodes", res.nodes}, {"bound", res.bound}});

  std::cout << "status " << to_string(res.status);
  if (res.has_plan) std::cout << ", objective " << res.objective << ", profit " << -res.objective;
  std::cout << "\n";
  for (const auto& n : res.notes) std::cout << "note: " << n << "\n";
  return exit_for(res.status, res.has_plan);
}

// ---------------------------------------------------------------------------

struct ParadoxArgs {
  Common c;
  SolverFlags f;
  std::string instance, scenarios;
  int scenario_count = 13;
  std::string standards = "11.8,8.6";
  std::string levels = "1.0,0.9,0.8,0.7";
};

int cmd_paradox(const ParadoxArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  const Inputs in = load_inputs(a.instance, a.scenarios, a.scenario_count, a.c.seed);
  ParadoxOptions po;
  po.solver = a.f.solver(a.c.seed);
  po.heuristic = a.f.heuristic;
  po.heuristic_options = a.f.heuristic_options();
  po.workers = a.c.workers;
  const auto standards = parse_list(a.standards);
  const auto levels = parse_list(a.levels);
  const ParadoxReport rep = run_paradox_experiment(*in.instance, *in.scenarios, standards, levels, po);
  json args = a.f.to_json();
  args["standards"] = standards;
  args["levels"] = levels;
  const json config = config_block("analyze paradox", a.c, args, in.meta);
  write_json_file((dir / "paradox.json").string(), {{"config", config}, {"report", to_json(rep)}});
  write_text_file((dir / "paradox.csv").string(), csv_with_header(config, paradox_csv(rep)));
  std::cout << "cells " << rep.cells.size() << ", paradox flags " << rep.paradox_count() << "\n";
  return kOk;
}

struct VoiArgs {
  Common c;
  SolverFlags f;
  std::string instance, scenarios, cii = "none";
  int scenario_count = 13;
};

int cmd_voi(const VoiArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  const Inputs in = load_inputs(a.instance, a.scenarios, a.scenario_count, a.c.seed);
  const CiiMode mode = cii_mode_from_string(a.cii);
  const InfoValueReport rep = compute_value_of_information(in.instance, in.scenarios, mode, a.f.solver(a.c.seed),
                                                           a.c.workers);
  json args = a.f.to_json();
  args["cii"] = to_string(mode);
  const json config = config_block("analyze voi", a.c, args, in.meta);
  write_json_file((dir / "voi.json").string(), {{"config", config}, {"report", to_json(rep)}});
  write_text_file((dir / "voi.csv").string(), csv_with_header(config, voi_csv(rep)));
  auto show = [](const std::optional<double>& v) {
    std::ostringstream os;
    if (v) os << *v; else os << "undefined";
    return os.str();
  };
  std::cout << "RP " << rep.rp << "\nWS " << rep.ws << "\nEMS " << show(rep.ems) << "\nEVPI " << show(rep.evpi)
            << "\nVSS " << show(rep.vss) << "\n";
  return kOk;
}

struct BenchArgs {
  Common c;
  SolverFlags f;
  std::string lanes = "2,3,4,5";
  int reps = 10;
  int ships = 2;
  int speeds = 1;
  int contracts = 2;
  int base_scenarios = 2;
  std::string cii = "none";
  double days = 150.0;
};

int cmd_bench(const BenchArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  BenchmarkOptions o;
  o.lane_counts.clear();
  for (double v : parse_list(a.lanes)) o.lane_counts.push_back(static_cast<int>(v));
  o.reps = a.reps;
  o.seed = a.c.seed;
  o.dims.ships = a.ships;
  o.dims.speeds = a.speeds;
  o.dims.contracts = a.contracts;
  o.base_scenarios = a.base_scenarios;
  o.ranges.contract_demand = {5000.0, 10000.0};
  o.ranges.frequency_choices = {1};
  o.ranges.available_days_p1 = o.ranges.available_days_p2 = a.days;
  o.mode = cii_mode_from_string(a.cii);
  o.solver = a.f.solver(a.c.seed);
  o.heuristic = a.f.heuristic_options();
  o.threshold = a.f.threshold;
  o.workers = a.c.workers;
  const BenchmarkReport rep = run_heuristic_benchmark(o);

  json args = a.f.to_json();
  args.update({{"lanes", o.lane_counts},       {"reps", a.reps},
               {"ships", a.ships},             {"speeds", a.speeds},
               {"contracts", a.contracts},     {"base_scenarios", a.base_scenarios},
               {"cii", to_string(o.mode)},     {"days", a.days}});
  const json config = config_block("analyze bench-heuristic", a.c, args, json::object());
  write_json_file((dir / "bench.json").string(), {{"config", config}, {"report", to_json(rep, false)}});
  write_text_file((dir / "deviations.csv").string(), csv_with_header(config, benchmark_csv(rep, false)));
  write_text_file((dir / "wilcoxon.csv").string(), csv_with_header(config, wilcoxon_csv(rep)));
  json timing = json::array();
  for (const auto& c : rep.cases) {
    timing.push_back({{"lanes", c.lanes}, {"seed", c.seed}, {"exact_time", c.exact_time},
                      {"heuristic_time", c.heuristic_time}});
  }
  write_json_file((dir / "timing.json").string(), {{"config", config}, {"cases", timing}});
  std::cout << wilcoxon_csv(rep);
  return kOk;
}

struct ExportArgs {
  Common c;
  std::string instance, scenarios, cii = "none";
  int scenario_count = 13;
};

int cmd_export(const ExportArgs& a) {
  const fs::path dir = prepare_dir(a.c.out);
  const Inputs in = load_inputs(a.instance, a.scenarios, a.scenario_count, a.c.seed);
  const ModelSpec model = build_two_stage_model(in.instance, in.scenarios, cii_mode_from_string(a.cii));
  write_text_file((dir / "model.lp").string(), write_lp(model));
  std::cout << "variables " << model.variables.size() << ", constraints " << model.constraints.size() << "\n";
  return kOk;
}

void add_inputs(CLI::App* app, std::string& instance, std::string& scenarios, int& count) {
  app->add_option("--instance", instance, "instance JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--scenario-file", scenarios, "scenario JSON (default: build from the instance)")
      ->check(CLI::ExistingFile);
  app->add_option("--scenarios", count, "scenario count when no file is given (13, 26, 39 or 52)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage tramp fleet deployment under CII constraints"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tramp 1.0");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a random instance and scenario set");
  add_common(g, gen.c);
  g->add_option("--ships", gen.dims.ships)->check(CLI::PositiveNumber);
  g->add_option("--lanes", gen.dims.lanes)->check(CLI::PositiveNumber);
  g->add_option("--contracts", gen.dims.contracts)->check(CLI::PositiveNumber);
  g->add_option("--types", gen.dims.capacity_types)->check(CLI::PositiveNumber);
  g->add_option("--speeds", gen.dims.speeds)->check(CLI::PositiveNumber);
  g->add_option("--cmax", gen.dims.c_max, "longest route in lanes (0 = lane count)");
  g->add_option("--max-routes", gen.dims.max_routes, "keep the routes with the lowest ballast ratio (0 = all)");
  g->add_option("--max-route-length", gen.dims.max_route_length, "drop multi-lane routes longer than this [nmile]");
  g->add_option("--scenarios", gen.scenarios, "13, 26, 39 or 52");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "solve an instance exactly or with the route-search heuristic");
  add_common(s, sol.c);
  add_solver_flags(s, sol.f);
  add_inputs(s, sol.instance, sol.scenarios, sol.scenario_count);
  s->add_option("--cii", sol.cii, "none, demand or supply");

  auto* an = app.add_subcommand("analyze", "paradox, voi or bench-heuristic reports");
  an->require_subcommand(1);

  ParadoxArgs par;
  auto* p = an->add_subcommand("paradox", "supply-based standard and emission-level grid");
  add_common(p, par.c);
  add_solver_flags(p, par.f);
  add_inputs(p, par.instance, par.scenarios, par.scenario_count);
  p->add_option("--standards", par.standards, "comma-separated g/(t*nmile)");
  p->add_option("--levels", par.levels, "comma-separated emission levels");

  VoiArgs voi;
  auto* v = an->add_subcommand("voi", "RP, WS, EMS, EVPI and VSS");
  add_common(v, voi.c);
  add_solver_flags(v, voi.f);
  add_inputs(v, voi.instance, voi.scenarios, voi.scenario_count);
  v->add_option("--cii", voi.cii, "none, demand or supply");

  BenchArgs bench;
  auto* b = an->add_subcommand("bench-heuristic", "heuristic versus exact deviations and Wilcoxon tests");
  add_common(b, bench.c);
  add_solver_flags(b, bench.f);
  b->add_option("--lanes", bench.lanes, "comma-separated lane counts");
  b->add_option("--reps", bench.reps, "instances per lane count")->check(CLI::PositiveNumber);
  b->add_option("--ships", bench.ships)->check(CLI::PositiveNumber);
  b->add_option("--speeds", bench.speeds)->check(CLI::PositiveNumber);
  b->add_option("--contracts", bench.contracts)->check(CLI::PositiveNumber);
  b->add_option("--base-scenarios", bench.base_scenarios, "first n base scenarios (0 = all 13)");
  b->add_option("--days", bench.days, "available days per stage");
  b->add_option("--cii", bench.cii, "none, demand or supply");

  ExportArgs ex;
  auto* e = app.add_subcommand("export-lp", "write the model in LP format");
  add_common(e, ex.c);
  add_inputs(e, ex.instance, ex.scenarios, ex.scenario_count);
  e->add_option("--cii", ex.cii, "none, demand or supply");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (s->parsed()) return cmd_solve(sol);
    if (p->parsed()) return cmd_paradox(par);
    if (v->parsed()) return cmd_voi(voi);
    if (b->parsed()) return cmd_bench(bench);
    if (e->parsed()) return cmd_export(ex);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
