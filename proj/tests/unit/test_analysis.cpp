#include <doctest.h>

#include <atomic>
#include <set>

#include "tramp/analysis.hpp"

using namespace tramp;

namespace {

ParadoxInputs worked_inputs() {
  ParadoxInputs in;
  in.m0 = 1e12;
  in.d0 = 1e5;
  in.p = 0.2;
  in.eps_laden = 6e6;
  in.eps_ballast = 4e6;
  in.eps_port = 0.0;
  in.speed = 12.0;
  in.capacity = 50000.0;
  return in;
}

std::shared_ptr<InstanceData> tiny_instance(std::uint64_t seed, int ships, int lanes) {
  GenerationDims d;
  d.ships = ships;
  d.lanes = lanes;
  d.speeds = 1;
  d.contracts = 1;
  d.capacity_types = 1;
  GenerationRanges gr;
  gr.contract_demand = {3000, 8000};
  gr.frequency_choices = {1};
  gr.available_days_p1 = gr.available_days_p2 = 45;
  gr.lane_distance = {2000, 4000};
  gr.spot_volume = {5000, 15000};
  gr.cii_standard = 25;
  return std::make_shared<InstanceData>(generate_instance(seed, d, gr));
}

}  // namespace

TEST_CASE("paradox worked example") {
  const auto in = worked_inputs();
  const auto ok = check_paradox_assumptions(in);
  CHECK(ok[0]);
  CHECK(ok[1]);
  CHECK(ok[2]);
  CHECK(ok[3]);
  const auto d = paradox_delta(in);
  CHECK(d.delta_distance == doctest::Approx(50000.0));
  CHECK(d.emission_increase == doctest::Approx(2e11));
  CHECK(paradox_adjusted_cii(in, d.delta_distance) == doctest::Approx(in.target_cii()).epsilon(1e-12));
  CHECK(in.target_cii() == doctest::Approx(0.8 * 1e12 / (50000.0 * 1e5)));
}

TEST_CASE("port emissions shrink the increase") {
  auto in = worked_inputs();
  in.eps_port = 12.0 * 1e6;
  const auto d = paradox_delta(in);
  CHECK(d.delta_distance == doctest::Approx(0.2e12 / (8e6 - 3e6)));
  CHECK(d.emission_increase == doctest::Approx(3e6 * d.delta_distance));
}

TEST_CASE("paradox assumption boundaries") {
  auto a2 = worked_inputs();
  a2.eps_port = a2.eps_ballast * a2.speed;
  CHECK_FALSE(check_paradox_assumptions(a2)[1]);
  CHECK_THROWS_AS(paradox_delta(a2), std::domain_error);

  auto a1 = worked_inputs();
  a1.eps_laden = a1.eps_ballast;
  CHECK_FALSE(check_paradox_assumptions(a1)[0]);
  CHECK_THROWS_WITH_AS(paradox_delta(a1), doctest::Contains("A1"), std::domain_error);

  auto a3 = worked_inputs();
  a3.fixed_laden_task = false;
  CHECK_THROWS_WITH_AS(paradox_delta(a3), doctest::Contains("A3"), std::domain_error);

  auto a4 = worked_inputs();
  a4.eps_ballast = 8e6;  // exactly C * target
  a4.eps_laden = 9e6;
  CHECK(check_paradox_assumptions(a4)[3]);
  a4.eps_ballast = 8.5e6;
  CHECK_FALSE(check_paradox_assumptions(a4)[3]);
  CHECK_THROWS_WITH_AS(paradox_delta(a4), doctest::Contains("A4"), std::domain_error);

  auto p = worked_inputs();
  p.p = 0.0;
  CHECK_THROWS_AS(paradox_delta(p), std::domain_error);
  p.p = 1.0;
  CHECK_THROWS_AS(paradox_delta(p), std::domain_error);
}

TEST_CASE("emission scaling leaves prior emissions alone") {
  const auto inst = *tiny_instance(0, 2, 2);
  const auto half = scale_emissions(inst, 0.5);
  for (std::size_t v = 0; v < inst.ships.size(); ++v) {
    CHECK(half.ships[v].prior_emissions == inst.ships[v].prior_emissions);
    CHECK(half.ships[v].ballast_emission_rate == doctest::Approx(0.5 * inst.ships[v].ballast_emission_rate));
    CHECK(half.ships[v].port_emission_rate == doctest::Approx(0.5 * inst.ships[v].port_emission_rate));
  }
  for (std::size_t q = 0; q < inst.voyage_profiles.size(); ++q) {
    CHECK(half.voyage_profiles[q].round_trip_emissions ==
          doctest::Approx(0.5 * inst.voyage_profiles[q].round_trip_emissions));
    CHECK(half.voyage_profiles[q].round_trip_cost_p1 == inst.voyage_profiles[q].round_trip_cost_p1);
  }
  CHECK_THROWS_AS(scale_emissions(inst, 0.0), std::invalid_argument);
  const auto std86 = with_cii_standard(inst, 8.6);
  for (const auto& s : std86.ships) CHECK(s.cii_standard == 8.6);
}

TEST_CASE("indicators follow the plan") {
  auto inst = tiny_instance(1, 2, 1);
  auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 2));
  const auto res = solve_exact(inst, set, CiiMode::demand_based);
  REQUIRE(res.has_plan);
  const auto model = build_two_stage_model(inst, set, CiiMode::demand_based);
  const auto expected = compute_indicators(res);
  CHECK(expected.total_profit == doctest::Approx(-res.objective));
  double co2 = 0.0;
  for (int s = 0; s < 2; ++s) {
    const auto one = compute_indicators(res.plan, model, s);
    REQUIRE(one.scenario.has_value());
    double sc = 0.0;
    for (int v = 0; v < 2; ++v) sc += cii_breakdown(res.plan, *inst, v, s).emissions;
    CHECK(one.co2_emission == doctest::Approx(sc));
    co2 += set->scenarios[s].probability * sc;
  }
  CHECK(expected.co2_emission == doctest::Approx(co2));
  for (const auto& ship : expected.ships) {
    CHECK(ship.ballast_ratio >= 0.0);
    CHECK(ship.ballast_ratio <= 1.0);
    if (ship.no_idle_time) CHECK(ship.ballast_ratio == 0.0);
    if (ship.avg_speed > 0.0) CHECK(ship.avg_speed == doctest::Approx(inst->ships[ship.ship].speeds[0]));
  }
  const auto j = to_json(expected);
  CHECK(j.contains("co2_emission"));
  CHECK(j["ships"].size() == 2);
}

TEST_CASE("ballast ratio with no idle time is flagged") {
  auto inst = tiny_instance(2, 1, 1);
  auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 1));
  const auto model = build_two_stage_model(inst, set, CiiMode::none);
  DeploymentPlan empty;
  const auto rep = compute_indicators(empty, model);
  REQUIRE(rep.ships.size() == 1);
  CHECK(rep.ships[0].no_idle_time);
  CHECK(rep.ships[0].ballast_ratio == 0.0);
  CHECK_FALSE(rep.flags.empty());
}

TEST_CASE("value of information with one scenario is exactly zero") {
  auto inst = tiny_instance(3, 1, 2);
  auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 1));
  const auto rep = compute_value_of_information(inst, set, CiiMode::none);
  REQUIRE(rep.evpi.has_value());
  REQUIRE(rep.vss.has_value());
  CHECK(*rep.evpi == 0.0);
  CHECK(*rep.vss == 0.0);
  CHECK(rep.ws == rep.rp);
  CHECK(rep.scenario_count == 1);
}

TEST_CASE("value of information ordering on two scenarios") {
  auto inst = tiny_instance(4, 1, 2);
  auto set = std::make_shared<ScenarioSet>(truncate_scenarios(build_base_scenarios(*inst), 2));
  const auto rep = compute_value_of_information(inst, set, CiiMode::none);
  REQUIRE(rep.ems.has_value());
  CHECK(rep.ws >= rep.rp - rep.gap_slack);
  CHECK(rep.rp >= *rep.ems - rep.gap_slack);
  CHECK(*rep.evpi == doctest::Approx(rep.ws - rep.rp));
  CHECK(*rep.vss == doctest::Approx(rep.rp - *rep.ems));
  CHECK(voi_csv(rep).find("ws_profit") != std::string::npos);
}

TEST_CASE("benchmark helpers") {
  std::set<std::uint64_t> seeds;
  for (int lanes = 2; lanes <= 5; ++lanes) {
    for (int rep = 0; rep < 10; ++rep) seeds.insert(benchmark_seed(0, lanes, rep));
  }
  CHECK(seeds.size() == 40);
  CHECK(benchmark_seed(1, 2, 0) != benchmark_seed(0, 2, 0));
  const auto base = build_base_scenarios(*tiny_instance(5, 1, 1));
  const auto two = truncate_scenarios(base, 2);
  REQUIRE(two.size() == 2);
  CHECK(two.scenarios[0].probability + two.scenarios[1].probability == doctest::Approx(1.0));
  CHECK(truncate_scenarios(base, 0).size() == 13);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](int i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(5, 2, [](int i) {
                    if (i == 3) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
