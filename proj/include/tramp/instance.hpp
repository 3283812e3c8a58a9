#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tramp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct ShipSpec {
  int id = 0;
  double available_days_p1 = 0.0;           // M_v^1
  double available_days_p2 = 0.0;           // M_v^2
  std::vector<double> capacity_by_type;     // Q_vk [t], indexed by capacity type
  double prior_emissions = 0.0;             // E_v^0 [g]
  double prior_work = 0.0;                  // W_v^0 [t*nmile]
  double cii_standard = 0.0;                // CII_v [g/(t*nmile)]
  double ballast_emission_rate = 0.0;       // E_v^ballast [g/day]
  double port_emission_rate = 0.0;          // E_v^port [g/day]
  double ballast_cost_rate_p1 = 0.0;        // C_v^ballast [USD/day]
  double port_cost_rate_p1 = 0.0;           // C_v^port [USD/day]
  double ballast_distance_per_day = 0.0;    // L_v^ballast [nmile/day]
  int initial_route = -1;                   // route r with y_vr^{1,0} = 1
  std::vector<double> speeds;               // E_v [knots], strictly increasing
  std::vector<int> sailable_routes;         // R_v

  // Propulsion: laden fuel burn in t/day at reference_speed, scaled by the
  // cube of the speed ratio.  Ballast legs burn ballast_fuel_per_day at the
  // same reference speed.
  double laden_fuel_per_day = 0.0;
  double ballast_fuel_per_day = 0.0;
  double reference_speed = 12.0;

  double total_capacity() const;
};

struct TradeLaneSpec {
  int id = 0;
  double laden_distance = 0.0;                  // L_i [nmile]
  std::vector<int> contracts_served;            // C_i^TR
  std::vector<double> spot_volume_p1_by_type;   // D_ik^SP [t]
  std::vector<double> spot_revenue_p1_by_type;  // R_ik^SP [USD/t]
  std::vector<int> eligible_ships;              // V_i
  std::optional<Point> origin;
  std::optional<Point> destination;
  double port_call_fee = 0.0;                   // fixed USD per laden call
};

struct ContractSpec {
  int id = 0;
  int frequency_p1 = 0;                          // F_c^1
  int frequency_p2 = 0;                          // F_c^2
  double demand_p1 = 0.0;                        // D_c [t]
  std::vector<int> compatible_capacity_types;    // K_c
};

struct RouteSpec {
  int id = 0;
  std::vector<int> lane_sequence;  // canonical rotation, smallest lane id first
  double total_length = 0.0;       // L_r^route
  double lane_length_sum = 0.0;
  double ballast_ratio = 0.0;

  bool contains_lane(int lane) const;
};

struct VoyageProfile {
  int ship = 0;
  int route = 0;
  int speed = 0;  // index into ShipSpec::speeds
  double round_trip_days = 0.0;
  double round_trip_cost_p1 = 0.0;
  double round_trip_emissions = 0.0;
};

struct TransferProfile {
  int ship = 0;
  int from_route = 0;
  int to_route = 0;
  int speed = 0;
  double transfer_days = 0.0;
  double transfer_cost_p1 = 0.0;
  double transfer_emissions = 0.0;
  double transfer_distance = 0.0;
};

/// Complete deterministic problem world.  Ids are dense: ships[v].id == v and
/// likewise for lanes, routes, contracts and capacity types.
///
/// Transfer profiles are stored for ordered pairs of distinct routes only; a
/// transfer from a route to itself costs nothing and takes no time.
struct InstanceData {
  std::vector<ShipSpec> ships;
  std::vector<TradeLaneSpec> lanes;
  std::vector<RouteSpec> routes;
  std::vector<ContractSpec> contracts;
  std::vector<std::string> capacity_types;
  std::vector<VoyageProfile> voyage_profiles;
  std::vector<TransferProfile> transfer_profiles;
  std::uint64_t rng_seed = 0;
  // Expected by the caller to be true when the instance was generated so that
  // the fleet can carry every contract and spot tonne.
  bool fleet_capacity_covers_demand = false;

  int num_types() const { return static_cast<int>(capacity_types.size()); }

  /// Builds lookup tables; must be called after the profile vectors change.
  void index_profiles();
  const VoyageProfile& voyage(int ship, int route, int speed) const;
  /// Returns a zero profile for from == to.
  TransferProfile transfer(int ship, int from, int to, int speed) const;
  bool has_voyage(int ship, int route, int speed) const;

  /// R_iv: routes sailable by ship v that serve lane i.
  std::vector<int> routes_serving(int lane, int ship) const;
  bool ship_serves_lane(int ship, int lane) const;

 private:
  std::vector<std::vector<int>> voyage_index_;    // [ship][route*S+speed] -> profile idx or -1
  std::vector<std::vector<int>> transfer_index_;  // [ship][(from*R+to)*S+speed]
  std::vector<int> max_speeds_;
};

/// Gap distance from the destination of lane a to the origin of lane b.
/// A single-lane route uses gap(i, i) as its return leg.
struct GapTable {
  std::vector<std::vector<double>> gap;
  static GapTable from_geometry(const std::vector<TradeLaneSpec>& lanes);
};

std::vector<RouteSpec> enumerate_routes(const std::vector<TradeLaneSpec>& lanes, int c_max,
                                        const GapTable* gaps = nullptr);

/// Closed-form count sum_{l=1..c_max} C(n,l) (l-1)!.
std::uint64_t route_count(int num_lanes, int c_max);

double ballast_ratio(const RouteSpec& route);

/// Ascending ballast ratio, then total length, then id.
std::vector<int> routes_by_ballast_ratio(const std::vector<RouteSpec>& routes);

struct ProfileParameters {
  double fuel_price = 400.0;               // USD per tonne of fuel
  double layover_days_per_lane = 1.5;      // port-call time added per laden lane
  double emission_factor = 3.114e6;        // g CO2 per tonne of fuel
};

/// Fills voyage and transfer profiles for every ship over its sailable routes.
void derive_voyage_profiles(InstanceData& instance, const ProfileParameters& params);

/// Transfer distance between the start points of two routes.
double route_transfer_distance(const InstanceData& instance, int from, int to);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GenerationDims {
  int ships = 15;
  int lanes = 5;
  int contracts = 3;
  int capacity_types = 2;
  int speeds = 3;
  int c_max = 0;                   // 0 = number of lanes
  double max_route_length = 49640.0;
  int max_routes = 0;              // 0 = no cap; otherwise keep the lowest ballast ratios
};

struct GenerationRanges {
  double available_days_p1 = 120.0;
  double available_days_p2 = 120.0;
  Range capacity{10331.0, 49944.0};
  Range contract_demand{144870.0, 176150.0};
  std::vector<int> frequency_choices{3, 6};
  Range spot_volume{15220.0, 24620.0};
  Range spot_revenue{49.0, 120.0};
  Range ballast_cost_rate{8480.0, 27820.0};
  Range port_cost_rate{850.0, 2780.0};
  Range ballast_emission_rate{36.75e6, 122.12e6};
  Range port_emission_rate{3.67e6, 12.21e6};
  Range prior_emissions{8.25e9, 28.64e9};
  Range prior_work{644.78e6, 2086.43e6};
  Range lane_distance{6144.0, 9904.0};
  double ballast_distance_per_day = 288.0;
  double cii_standard = 11.8;
  Range speed{12.0, 16.0};
  Range laden_to_ballast_fuel{1.2, 1.6};
  Range port_call_fee{15000.0, 45000.0};
  ProfileParameters profile;
};

InstanceData generate_instance(std::uint64_t seed, const GenerationDims& dims = {},
                               const GenerationRanges& ranges = {});

struct Violation {
  std::string field;
  std::string rule;
};

std::vector<Violation> validate_instance(const InstanceData& instance);

/// Copy of the instance where each ship may only sail the given routes (plus
/// its initial route, which anchors the first transfer).
InstanceData restrict_routes(const InstanceData& instance, const std::vector<int>& route_ids);

}  // namespace tramp
