#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tramp/analysis.hpp"
#include "tramp/solve.hpp"

using namespace tramp;

TEST_CASE("wilcoxon p-value equals sign enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grid(0, 12);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<double> dev;
    // Coarse grid values force ties and zero differences.
    for (int q = 0; q < n; ++q) dev.push_back(0.01 * grid(rng));
    const auto w = wilcoxon_one_sided(dev, 0.05);
    CHECK(w.exact);
    CHECK(w.p_value == doctest::Approx(oracle::wilcoxon_enumerated_p(dev, 0.05)).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon edge cases") {
  const auto zero = wilcoxon_one_sided({0.05, 0.05, 0.05}, 0.05);
  CHECK(zero.all_zero);
  CHECK(zero.p_value == 1.0);
  const auto low = wilcoxon_one_sided({0.0, 0.0, 0.01, 0.02}, 0.05);
  CHECK(low.statistic == 0.0);
  CHECK(low.p_value == doctest::Approx(1.0));
  const auto high = wilcoxon_one_sided({0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, 0.05);
  CHECK(high.p_value == doctest::Approx(1.0 / 256.0));
  std::vector<double> many(30, 0.0);
  for (int q = 0; q < 30; ++q) many[q] = 0.01 * q;
  const auto approx = wilcoxon_one_sided(many, 0.05);
  CHECK_FALSE(approx.exact);
  CHECK(approx.p_value > 0.0);
  CHECK(approx.p_value < 0.01);
}

TEST_CASE("deviation measures") {
  CHECK(*normalized_deviation(90.0, 200.0, 100.0, 210.0) == doctest::Approx(20.0 / 310.0));
  CHECK_FALSE(normalized_deviation(1.0, 1.0, 0.0, 0.0).has_value());
  CHECK(*objective_ratio_error(-95.0, -100.0) == doctest::Approx(0.05));
  CHECK_FALSE(objective_ratio_error(1.0, 0.0).has_value());
}

TEST_CASE("default step length is the ceiling of one and a half lanes") {
  CHECK(default_step_length(1) == 2);
  CHECK(default_step_length(2) == 3);
  CHECK(default_step_length(4) == 6);
  CHECK(default_step_length(5) == 8);
  CHECK(default_step_length(6) == 9);
}

TEST_CASE("initial route positions cover every lane greedily") {
  const std::vector<std::vector<int>> sorted = {{0}, {0, 1}, {1}, {1, 2}, {2}};
  CHECK(initial_route_positions(sorted, 3) == std::vector<std::size_t>{0, 1, 3});
  CHECK(initial_route_positions({{1}, {0}, {0, 1}}, 2) == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(initial_route_positions({{0}, {1}}, 3), std::invalid_argument);
}

TEST_CASE("option validation") {
  SolverOptions so;
  so.gap = 1.0;
  CHECK_THROWS_AS(validate(so), std::invalid_argument);
  so.gap = 0.0;
  so.time_limit = 0.0;
  CHECK_THROWS_AS(validate(so), std::invalid_argument);
  HeuristicOptions ho;
  ho.threshold = -1.0;
  CHECK_THROWS_AS(validate(ho), std::invalid_argument);
  CHECK(engine_from_string("builtin") == Engine::builtin_bnb);
  CHECK(engine_from_string("external") == Engine::external);
  CHECK_THROWS_AS(engine_from_string("cplex"), std::invalid_argument);
}

TEST_CASE("heuristic never beats the exact optimum") {
  GenerationDims d;
  d.ships = 1;
  d.lanes = 3;
  d.speeds = 1;
  d.contracts = 1;
  d.capacity_types = 1;
  GenerationRanges gr;
  gr.contract_demand = {3000, 8000};
  gr.frequency_choices = {1};
  gr.available_days_p1 = gr.available_days_p2 = 45;
  gr.lane_distance = {2000, 4000};
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto inst = std::make_shared<InstanceData>(generate_instance(seed, d, gr));
    auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 1));
    SolverOptions so;
    so.time_limit = 60;
    const auto exact = solve_exact(inst, set, CiiMode::none, so);
    HeuristicTrace trace;
    const auto heur = heuristic_route_search(inst, set, CiiMode::none, {}, so, &trace);
    if (!exact.has_plan || !heur.has_plan) continue;
    ++compared;
    CHECK(heur.objective >= exact.objective - 1e-6 * std::max(1.0, std::abs(exact.objective)));
    CHECK(trace.sorted_routes.size() == inst->routes.size());
    CHECK_FALSE(trace.initial_set.empty());
    CHECK(trace.iterations.size() <= 4);
    CHECK(heur.routes_considered <= static_cast<int>(inst->routes.size()));
    const auto model = build_two_stage_model(heur.instance, heur.scenarios, heur.mode);
    CHECK(check_plan_feasibility(heur.plan, model).empty());
  }
  CHECK(compared >= 2);
}

TEST_CASE("result observer sees every plan") {
  GenerationDims d;
  d.ships = 1;
  d.lanes = 1;
  d.speeds = 1;
  d.contracts = 1;
  d.capacity_types = 1;
  GenerationRanges gr;
  gr.contract_demand = {3000, 8000};
  gr.frequency_choices = {1};
  gr.available_days_p1 = gr.available_days_p2 = 45;
  auto inst = std::make_shared<InstanceData>(generate_instance(0, d, gr));
  auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 2));
  int seen = 0;
  SolverOptions so;
  so.on_result = [&](const SolveResult& r, const ModelSpec& m) {
    ++seen;
    CHECK(r.has_plan);
    CHECK(m.variables.size() > 0);
  };
  const auto res = solve_exact(inst, set, CiiMode::none, so);
  CHECK(seen == (res.has_plan ? 1 : 0));
}
