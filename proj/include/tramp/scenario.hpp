#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tramp/instance.hpp"

namespace tramp {

enum class Direction : int { down = -1, flat = 0, up = 1 };

struct FactorDirection {
  Direction fuel_price = Direction::flat;
  Direction market_demand = Direction::flat;
  Direction freight_rate = Direction::flat;

  bool operator==(const FactorDirection&) const = default;
};

double scaling_multiplier(Direction d);
std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// P-2 parameters of one scenario.  Voyage, transfer, ballast and port costs
/// are kept as per-ship multipliers of the P-1 values; the scenario cost of a
/// round trip is round_trip_cost_p1 * voyage_cost_multiplier[v].
struct Scenario {
  int id = 0;
  FactorDirection directions;
  double probability = 0.0;
  std::vector<double> demand_p2;                      // D_cs per contract
  std::vector<std::vector<double>> spot_volume_p2;    // D_iks^SP [lane][type]
  std::vector<std::vector<double>> spot_revenue_p2;   // R_iks^SP [lane][type]
  std::vector<double> voyage_cost_multiplier;         // per ship
  std::vector<double> transfer_cost_multiplier;
  std::vector<double> ballast_cost_multiplier;
  std::vector<double> port_cost_multiplier;
  int base_id = -1;  // base scenario this one was expanded from, or -1

  double voyage_cost(const InstanceData& inst, int ship, int route, int speed) const;
  double transfer_cost(const InstanceData& inst, int ship, int from, int to, int speed) const;
  double ballast_cost_rate(const InstanceData& inst, int ship) const;
  double port_cost_rate(const InstanceData& inst, int ship) const;
};

struct ExpansionInfo {
  int variants_per_base = 0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  int base_count = 0;
  ExpansionInfo expansion;
  std::string instance_hash;  // content hash of the instance the set was built for

  std::size_t size() const { return scenarios.size(); }
};

/// The thirteen admissible direction triples with equal probability.
std::vector<FactorDirection> base_directions();
bool admissible(const FactorDirection& d);

struct ScalingOptions {
  // Fraction of every cost parameter that follows the fuel price.
  double fuel_share = 1.0;
};

Scenario apply_scaling(const InstanceData& instance, const FactorDirection& directions,
                       const ScalingOptions& options = {});

/// Base set: the thirteen triples, each scaled against the instance.
ScenarioSet build_base_scenarios(const InstanceData& instance, const ScalingOptions& options = {});

struct CorrelationMatrix {
  std::array<std::array<double, 3>, 3> value{};
  std::array<std::array<bool, 3>, 3> defined{};
  std::array<bool, 3> zero_variance{};
};

/// Probability-weighted correlation of the +1/0/-1 direction encodings, in the
/// order fuel price, market demand, freight rate.
CorrelationMatrix factor_correlations(const ScenarioSet& set);

ScenarioSet expand_scenarios(const ScenarioSet& base, int variants_per_base = 3,
                             double amplitude = 0.15, std::uint64_t seed = 0);

/// Single scenario whose parameters are the probability-weighted means.
Scenario mean_scenario(const ScenarioSet& set);

/// Set holding one scenario with probability one.
ScenarioSet single_scenario_set(const ScenarioSet& set, int index);
ScenarioSet single_scenario_set(const Scenario& scenario, const std::string& instance_hash);

/// Empty when the set fits the instance; otherwise a list of problems.
std::vector<std::string> check_scenarios(const InstanceData& instance, const ScenarioSet& set);

}  // namespace tramp
