#include "tramp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tramp {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double ShipSpec::total_capacity() const {
  return std::accumulate(capacity_by_type.begin(), capacity_by_type.end(), 0.0);
}

bool RouteSpec::contains_lane(int lane) const {
  return std::find(lane_sequence.begin(), lane_sequence.end(), lane) != lane_sequence.end();
}

// ---------------------------------------------------------------------------
// Profile lookup

void InstanceData::index_profiles() {
  const int num_routes = static_cast<int>(routes.size());
  max_speeds_.assign(ships.size(), 0);
  for (std::size_t v = 0; v < ships.size(); ++v) {
    max_speeds_[v] = static_cast<int>(ships[v].speeds.size());
  }
  voyage_index_.assign(ships.size(), {});
  transfer_index_.assign(ships.size(), {});
  for (std::size_t v = 0; v < ships.size(); ++v) {
    const std::size_t s = static_cast<std::size_t>(std::max(1, max_speeds_[v]));
    voyage_index_[v].assign(static_cast<std::size_t>(num_routes) * s, -1);
    transfer_index_[v].assign(static_cast<std::size_t>(num_routes) * num_routes * s, -1);
  }
  auto in_range = [&](int ship, int route, int speed) {
    return ship >= 0 && ship < static_cast<int>(ships.size()) && route >= 0 &&
           route < num_routes && speed >= 0 && speed < max_speeds_[ship];
  };
  for (std::size_t p = 0; p < voyage_profiles.size(); ++p) {
    const auto& vp = voyage_profiles[p];
    if (!in_range(vp.ship, vp.route, vp.speed)) continue;
    voyage_index_[vp.ship][static_cast<std::size_t>(vp.route) * max_speeds_[vp.ship] + vp.speed] =
        static_cast<int>(p);
  }
  for (std::size_t p = 0; p < transfer_profiles.size(); ++p) {
    const auto& tp = transfer_profiles[p];
    if (!in_range(tp.ship, tp.from_route, tp.speed) || tp.to_route < 0 || tp.to_route >= num_routes)
      continue;
    const std::size_t key =
        (static_cast<std::size_t>(tp.from_route) * num_routes + tp.to_route) * max_speeds_[tp.ship] +
        tp.speed;
    transfer_index_[tp.ship][key] = static_cast<int>(p);
  }
}

bool InstanceData::has_voyage(int ship, int route, int speed) const {
  if (ship < 0 || ship >= static_cast<int>(voyage_index_.size())) return false;
  if (route < 0 || route >= static_cast<int>(routes.size())) return false;
  if (speed < 0 || speed >= max_speeds_[ship]) return false;
  return voyage_index_[ship][static_cast<std::size_t>(route) * max_speeds_[ship] + speed] >= 0;
}

const VoyageProfile& InstanceData::voyage(int ship, int route, int speed) const {
  if (!has_voyage(ship, route, speed)) {
    std::ostringstream os;
    os << "no voyage profile for ship " << ship << ", route " << route << ", speed " << speed;
    throw std::out_of_range(os.str());
  }
  return voyage_profiles[voyage_index_[ship][static_cast<std::size_t>(route) * max_speeds_[ship] +
                                             speed]];
}

TransferProfile InstanceData::transfer(int ship, int from, int to, int speed) const {
  if (from == to) return TransferProfile{ship, from, to, speed, 0.0, 0.0, 0.0, 0.0};
  const int num_routes = static_cast<int>(routes.size());
  if (ship < 0 || ship >= static_cast<int>(transfer_index_.size()) || from < 0 ||
      from >= num_routes || to < 0 || to >= num_routes || speed < 0 || speed >= max_speeds_[ship]) {
    throw std::out_of_range("transfer profile index out of range");
  }
  const int p = transfer_index_[ship][(static_cast<std::size_t>(from) * num_routes + to) *
                                          max_speeds_[ship] +
                                      speed];
  if (p < 0) {
    std::ostringstream os;
    os << "no transfer profile for ship " << ship << ", " << from << " -> " << to << ", speed "
       << speed;
    throw std::out_of_range(os.str());
  }
  return transfer_profiles[p];
}

bool InstanceData::ship_serves_lane(int ship, int lane) const {
  const auto& el = lanes.at(lane).eligible_ships;
  return std::find(el.begin(), el.end(), ship) != el.end();
}

std::vector<int> InstanceData::routes_serving(int lane, int ship) const {
  std::vector<int> out;
  for (int r : ships.at(ship).sailable_routes) {
    if (routes.at(r).contains_lane(lane)) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Routes

GapTable GapTable::from_geometry(const std::vector<TradeLaneSpec>& lanes) {
  GapTable t;
  t.gap.assign(lanes.size(), std::vector<double>(lanes.size(), 0.0));
  for (std::size_t a = 0; a < lanes.size(); ++a) {
    if (!lanes[a].origin || !lanes[a].destination) {
      throw std::invalid_argument("lane " + std::to_string(lanes[a].id) +
                                  " has no endpoint geometry and no gap table was supplied");
    }
  }
  for (std::size_t a = 0; a < lanes.size(); ++a) {
    for (std::size_t b = 0; b < lanes.size(); ++b) {
      t.gap[a][b] = distance(*lanes[a].destination, *lanes[b].origin);
    }
  }
  return t;
}

std::uint64_t route_count(int num_lanes, int c_max) {
  std::uint64_t total = 0;
  for (int l = 1; l <= std::min(c_max, num_lanes); ++l) {
    // C(n,l) computed incrementally to stay exact.
    std::uint64_t binom = 1;
    for (int j = 1; j <= l; ++j) binom = binom * static_cast<std::uint64_t>(num_lanes - l + j) / j;
    std::uint64_t fact = 1;
    for (int j = 2; j < l; ++j) fact *= static_cast<std::uint64_t>(j);
    total += binom * fact;
  }
  return total;
}

namespace {

void for_each_combination(int n, int k, std::vector<int>& current, int start,
                          const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(current.size()) == k) {
    fn(current);
    return;
  }
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    for_each_combination(n, k, current, i + 1, fn);
    current.pop_back();
  }
}

}  // namespace

std::vector<RouteSpec> enumerate_routes(const std::vector<TradeLaneSpec>& lanes, int c_max,
                                        const GapTable* gaps) {
  if (lanes.empty()) throw std::invalid_argument("enumerate_routes: empty lane list");
  if (c_max < 1) throw std::invalid_argument("enumerate_routes: c_max must be >= 1");
  const int n = static_cast<int>(lanes.size());
  c_max = std::min(c_max, n);

  GapTable owned;
  if (gaps == nullptr) {
    owned = GapTable::from_geometry(lanes);
    gaps = &owned;
  }
  if (static_cast<int>(gaps->gap.size()) != n) {
    throw std::invalid_argument("enumerate_routes: gap table size does not match lane count");
  }

  std::vector<RouteSpec> routes;
  std::vector<int> combo;
  for (int l = 1; l <= c_max; ++l) {
    for_each_combination(n, l, combo, 0, [&](const std::vector<int>& subset) {
      // The smallest lane leads; permuting the remainder yields each directed
      // cycle exactly once in its lexicographically smallest rotation.
      std::vector<int> rest(subset.begin() + 1, subset.end());
      do {
        RouteSpec r;
        r.id = static_cast<int>(routes.size());
        r.lane_sequence.push_back(lanes[subset[0]].id);
        for (int x : rest) r.lane_sequence.push_back(lanes[x].id);
        std::vector<int> pos;
        pos.push_back(subset[0]);
        pos.insert(pos.end(), rest.begin(), rest.end());
        for (std::size_t k = 0; k < pos.size(); ++k) {
          const int a = pos[k];
          const int b = pos[(k + 1) % pos.size()];
          r.lane_length_sum += lanes[a].laden_distance;
          r.total_length += lanes[a].laden_distance + gaps->gap[a][b];
        }
        r.ballast_ratio = ballast_ratio(r);
        routes.push_back(std::move(r));
      } while (std::next_permutation(rest.begin(), rest.end()));
    });
  }
  return routes;
}

double ballast_ratio(const RouteSpec& route) {
  if (!(route.total_length > 0.0)) {
    throw std::invalid_argument("ballast_ratio: route " + std::to_string(route.id) +
                                " has non-positive total length");
  }
  if (!(route.lane_length_sum > 0.0)) {
    throw std::invalid_argument("ballast_ratio: route " + std::to_string(route.id) +
                                " has no laden distance");
  }
  if (route.lane_length_sum > route.total_length * (1.0 + 1e-12)) {
    throw std::invalid_argument("ballast_ratio: route " + std::to_string(route.id) +
                                " is shorter than its lanes");
  }
  return std::clamp(1.0 - route.lane_length_sum / route.total_length, 0.0, 1.0);
}

std::vector<int> routes_by_ballast_ratio(const std::vector<RouteSpec>& routes) {
  std::vector<int> order(routes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ra = routes[a];
    const auto& rb = routes[b];
    if (ra.ballast_ratio != rb.ballast_ratio) return ra.ballast_ratio < rb.ballast_ratio;
    if (ra.total_length != rb.total_length) return ra.total_length < rb.total_length;
    return ra.id < rb.id;
  });
  std::vector<int> ids;
  ids.reserve(order.size());
  for (int i : order) ids.push_back(routes[i].id);
  return ids;
}

// ---------------------------------------------------------------------------
// Profiles

double route_transfer_distance(const InstanceData& instance, int from, int to) {
  if (from == to) return 0.0;
  const auto& a = instance.lanes.at(instance.routes.at(from).lane_sequence.front());
  const auto& b = instance.lanes.at(instance.routes.at(to).lane_sequence.front());
  if (!a.origin || !b.origin) {
    throw std::invalid_argument("route_transfer_distance: missing lane geometry");
  }
  return distance(*a.origin, *b.origin);
}

void derive_voyage_profiles(InstanceData& instance, const ProfileParameters& params) {
  if (!(params.fuel_price > 0.0)) {
    throw std::invalid_argument("derive_voyage_profiles: fuel price must be positive");
  }
  instance.voyage_profiles.clear();
  instance.transfer_profiles.clear();
  for (const auto& ship : instance.ships) {
    if (ship.speeds.empty()) {
      throw std::invalid_argument("derive_voyage_profiles: ship " + std::to_string(ship.id) +
                                  " has no speed set");
    }
    for (std::size_t e = 0; e < ship.speeds.size(); ++e) {
      if (!(ship.speeds[e] > 0.0)) {
        throw std::invalid_argument("derive_voyage_profiles: non-positive speed");
      }
    }
    for (int r : ship.sailable_routes) {
      const auto& route = instance.routes.at(r);
      const double ballast_nm = route.total_length - route.lane_length_sum;
      double fees = 0.0;
      for (int lane : route.lane_sequence) fees += instance.lanes.at(lane).port_call_fee;
      const double layover =
          params.layover_days_per_lane * static_cast<double>(route.lane_sequence.size());
      for (std::size_t e = 0; e < ship.speeds.size(); ++e) {
        const double speed = ship.speeds[e];
        const double cube = std::pow(speed / ship.reference_speed, 3.0);
        const double laden_days = route.lane_length_sum / (24.0 * speed);
        const double ballast_days = ballast_nm / (24.0 * speed);
        const double fuel = (ship.laden_fuel_per_day * laden_days +
                             ship.ballast_fuel_per_day * ballast_days) *
                            cube;
        VoyageProfile vp;
        vp.ship = ship.id;
        vp.route = r;
        vp.speed = static_cast<int>(e);
        vp.round_trip_days = laden_days + ballast_days + layover;
        vp.round_trip_cost_p1 = fuel * params.fuel_price + fees + ship.port_cost_rate_p1 * layover;
        vp.round_trip_emissions = fuel * params.emission_factor + ship.port_emission_rate * layover;
        instance.voyage_profiles.push_back(vp);
      }
    }
    for (int r : ship.sailable_routes) {
      for (int r2 : ship.sailable_routes) {
        if (r == r2) continue;
        const double dist = route_transfer_distance(instance, r, r2);
        for (std::size_t e = 0; e < ship.speeds.size(); ++e) {
          const double speed = ship.speeds[e];
          const double days = dist / (24.0 * speed);
          const double fuel =
              ship.ballast_fuel_per_day * std::pow(speed / ship.reference_speed, 3.0) * days;
          TransferProfile tp;
          tp.ship = ship.id;
          tp.from_route = r;
          tp.to_route = r2;
          tp.speed = static_cast<int>(e);
          tp.transfer_days = days;
          tp.transfer_cost_p1 = fuel * params.fuel_price;
          tp.transfer_emissions = fuel * params.emission_factor;
          tp.transfer_distance = dist;
          instance.transfer_profiles.push_back(tp);
        }
      }
    }
  }
  instance.index_profiles();
}

// ---------------------------------------------------------------------------
// Generation

namespace {

void check_range(const Range& r, const char* name) {
  if (r.lo > r.hi) throw std::invalid_argument(std::string("inverted range: ") + name);
}

struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}
  double uniform(const Range& r) {
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin() { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; }
};

std::vector<TradeLaneSpec> generate_lane_geometry(Sampler& s, int num_lanes, const Range& dist) {
  // Regions live on a square plane; lanes join region pairs whose distance
  // falls inside the laden-distance range.
  const double side = dist.hi * 1.1;
  const int num_regions = num_lanes + 2;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Point> regions(num_regions);
    for (auto& p : regions) p = Point{s.uniform({0.0, side}), s.uniform({0.0, side})};
    std::vector<std::pair<int, int>> candidates;
    for (int a = 0; a < num_regions; ++a) {
      for (int b = 0; b < num_regions; ++b) {
        if (a == b) continue;
        const double d = distance(regions[a], regions[b]);
        if (d >= dist.lo && d <= dist.hi) candidates.emplace_back(a, b);
      }
    }
    if (static_cast<int>(candidates.size()) < num_lanes) continue;
    std::shuffle(candidates.begin(), candidates.end(), s.rng);
    std::vector<TradeLaneSpec> lanes;
    std::set<std::pair<int, int>> used;
    for (const auto& [a, b] : candidates) {
      if (static_cast<int>(lanes.size()) == num_lanes) break;
      // Prefer lanes that chain with earlier ones so multi-lane routes exist.
      if (!lanes.empty() && used.count({b, a})) continue;
      TradeLaneSpec lane;
      lane.id = static_cast<int>(lanes.size());
      lane.origin = regions[a];
      lane.destination = regions[b];
      lane.laden_distance = distance(regions[a], regions[b]);
      lanes.push_back(std::move(lane));
      used.insert({a, b});
    }
    if (static_cast<int>(lanes.size()) == num_lanes) return lanes;
  }
  throw std::runtime_error("generate_instance: could not place lanes inside the distance range");
}

}  // namespace

InstanceData generate_instance(std::uint64_t seed, const GenerationDims& dims,
                               const GenerationRanges& ranges) {
  if (dims.ships < 1 || dims.lanes < 1 || dims.contracts < 1 || dims.capacity_types < 1 ||
      dims.speeds < 1) {
    throw std::invalid_argument("generate_instance: every dimension must be >= 1");
  }
  check_range(ranges.capacity, "capacity");
  check_range(ranges.contract_demand, "contract_demand");
  check_range(ranges.spot_volume, "spot_volume");
  check_range(ranges.spot_revenue, "spot_revenue");
  check_range(ranges.ballast_cost_rate, "ballast_cost_rate");
  check_range(ranges.port_cost_rate, "port_cost_rate");
  check_range(ranges.ballast_emission_rate, "ballast_emission_rate");
  check_range(ranges.port_emission_rate, "port_emission_rate");
  check_range(ranges.prior_emissions, "prior_emissions");
  check_range(ranges.prior_work, "prior_work");
  check_range(ranges.lane_distance, "lane_distance");
  check_range(ranges.speed, "speed");
  check_range(ranges.laden_to_ballast_fuel, "laden_to_ballast_fuel");
  check_range(ranges.port_call_fee, "port_call_fee");
  if (ranges.frequency_choices.empty()) {
    throw std::invalid_argument("generate_instance: empty frequency choices");
  }
  if (!(ranges.lane_distance.lo > 0.0)) {
    throw std::invalid_argument("generate_instance: lane distances must be positive");
  }

  Sampler s(seed);
  InstanceData inst;
  inst.rng_seed = seed;
  for (int k = 0; k < dims.capacity_types; ++k) inst.capacity_types.push_back("type" + std::to_string(k));

  inst.lanes = generate_lane_geometry(s, dims.lanes, ranges.lane_distance);
  for (auto& lane : inst.lanes) {
    lane.port_call_fee = s.uniform(ranges.port_call_fee);
    for (int k = 0; k < dims.capacity_types; ++k) {
      lane.spot_volume_p1_by_type.push_back(s.uniform(ranges.spot_volume));
      lane.spot_revenue_p1_by_type.push_back(s.uniform(ranges.spot_revenue));
    }
  }

  // Routes: all directed cycles up to c_max lanes, filtered by length.
  const int c_max = dims.c_max > 0 ? dims.c_max : dims.lanes;
  auto all_routes = enumerate_routes(inst.lanes, c_max);
  std::vector<RouteSpec> kept;
  for (auto& r : all_routes) {
    if (r.lane_sequence.size() == 1 || r.total_length <= dims.max_route_length) kept.push_back(r);
  }
  if (dims.max_routes > 0 && static_cast<int>(kept.size()) > dims.max_routes) {
    auto order = routes_by_ballast_ratio(kept);
    std::set<int> keep_ids(order.begin(), order.begin() + dims.max_routes);
    std::set<int> covered;
    for (const auto& r : kept) {
      if (keep_ids.count(r.id)) covered.insert(r.lane_sequence.begin(), r.lane_sequence.end());
    }
    for (const auto& r : kept) {
      if (r.lane_sequence.size() == 1 && !covered.count(r.lane_sequence[0])) keep_ids.insert(r.id);
    }
    std::vector<RouteSpec> capped;
    for (auto& r : kept) {
      if (keep_ids.count(r.id)) capped.push_back(r);
    }
    kept = std::move(capped);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = static_cast<int>(i);
  inst.routes = std::move(kept);

  for (int c = 0; c < dims.contracts; ++c) {
    ContractSpec con;
    con.id = c;
    con.frequency_p1 = ranges.frequency_choices[s.index(static_cast<int>(ranges.frequency_choices.size()))];
    con.frequency_p2 = ranges.frequency_choices[s.index(static_cast<int>(ranges.frequency_choices.size()))];
    con.demand_p1 = s.uniform(ranges.contract_demand);
    for (int k = 0; k < dims.capacity_types; ++k) {
      if (s.coin()) con.compatible_capacity_types.push_back(k);
    }
    if (con.compatible_capacity_types.empty()) {
      con.compatible_capacity_types.push_back(s.index(dims.capacity_types));
    }
    inst.contracts.push_back(std::move(con));
    inst.lanes[c % dims.lanes].contracts_served.push_back(c);
  }

  std::vector<double> speeds;
  for (int e = 0; e < dims.speeds; ++e) {
    const double t = dims.speeds == 1 ? 0.0 : static_cast<double>(e) / (dims.speeds - 1);
    speeds.push_back(ranges.speed.lo + t * (ranges.speed.hi - ranges.speed.lo));
  }
  const double emission_factor = ranges.profile.emission_factor;
  for (int v = 0; v < dims.ships; ++v) {
    ShipSpec ship;
    ship.id = v;
    ship.available_days_p1 = ranges.available_days_p1;
    ship.available_days_p2 = ranges.available_days_p2;
    for (int k = 0; k < dims.capacity_types; ++k) ship.capacity_by_type.push_back(s.uniform(ranges.capacity));
    ship.prior_emissions = s.uniform(ranges.prior_emissions);
    ship.prior_work = s.uniform(ranges.prior_work);
    ship.cii_standard = ranges.cii_standard;
    ship.ballast_emission_rate = s.uniform(ranges.ballast_emission_rate);
    ship.port_emission_rate = s.uniform(ranges.port_emission_rate);
    ship.ballast_cost_rate_p1 = s.uniform(ranges.ballast_cost_rate);
    ship.port_cost_rate_p1 = s.uniform(ranges.port_cost_rate);
    ship.ballast_distance_per_day = ranges.ballast_distance_per_day;
    ship.speeds = speeds;
    ship.reference_speed = ranges.ballast_distance_per_day / 24.0;
    ship.ballast_fuel_per_day = ship.ballast_emission_rate / emission_factor;
    ship.laden_fuel_per_day = ship.ballast_fuel_per_day * s.uniform(ranges.laden_to_ballast_fuel);
    for (const auto& r : inst.routes) ship.sailable_routes.push_back(r.id);
    ship.initial_route = s.index(static_cast<int>(inst.routes.size()));
    inst.ships.push_back(std::move(ship));
  }
  for (auto& lane : inst.lanes) {
    for (int v = 0; v < dims.ships; ++v) lane.eligible_ships.push_back(v);
  }

  derive_voyage_profiles(inst, ranges.profile);

  double demand = 0.0;
  for (const auto& c : inst.contracts) demand += c.demand_p1;
  for (const auto& lane : inst.lanes) {
    for (double d : lane.spot_volume_p1_by_type) demand += d;
  }
  double supply = 0.0;
  for (const auto& ship : inst.ships) {
    double fastest = std::numeric_limits<double>::infinity();
    for (const auto& vp : inst.voyage_profiles) {
      if (vp.ship == ship.id) fastest = std::min(fastest, vp.round_trip_days);
    }
    if (std::isfinite(fastest)) {
      supply += ship.total_capacity() * std::floor(ship.available_days_p1 / fastest);
    }
  }
  inst.fleet_capacity_covers_demand = supply >= demand;
  return inst;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_instance(const InstanceData& inst) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string rule) {
    out.push_back(Violation{std::move(field), std::move(rule)});
  };
  const int nv = static_cast<int>(inst.ships.size());
  const int nl = static_cast<int>(inst.lanes.size());
  const int nr = static_cast<int>(inst.routes.size());
  const int nc = static_cast<int>(inst.contracts.size());
  const int nk = inst.num_types();

  for (int v = 0; v < nv; ++v) {
    const auto& s = inst.ships[v];
    const std::string f = "ships[" + std::to_string(v) + "]";
    if (s.id != v) add(f + ".id", "ids must be dense and match position");
    if (s.available_days_p1 < 0 || s.available_days_p2 < 0) add(f + ".available_days", "must be >= 0");
    if (static_cast<int>(s.capacity_by_type.size()) != nk) {
      add(f + ".capacity_by_type", "one entry per capacity type");
    }
    for (double q : s.capacity_by_type) {
      if (q < 0) add(f + ".capacity_by_type", "must be >= 0");
    }
    if (s.prior_emissions < 0 || s.prior_work < 0) add(f + ".prior", "must be >= 0");
    if (!(s.cii_standard > 0)) add(f + ".cii_standard", "must be > 0");
    if (s.ballast_emission_rate < 0 || s.port_emission_rate < 0 || s.ballast_cost_rate_p1 < 0 ||
        s.port_cost_rate_p1 < 0 || s.ballast_distance_per_day < 0) {
      add(f + ".rates", "must be >= 0");
    }
    if (s.speeds.empty()) add(f + ".speeds", "must be non-empty");
    for (std::size_t e = 1; e < s.speeds.size(); ++e) {
      if (!(s.speeds[e] > s.speeds[e - 1])) add(f + ".speeds", "must be strictly increasing");
    }
    bool routes_ok = true;
    for (int r : s.sailable_routes) {
      if (r < 0 || r >= nr) {
        add(f + ".sailable_routes", "references unknown route " + std::to_string(r));
        routes_ok = false;
      }
    }
    if (s.initial_route < 0 || s.initial_route >= nr) {
      add(f + ".initial_route", "must reference an existing route");
    } else if (routes_ok && std::find(s.sailable_routes.begin(), s.sailable_routes.end(),
                                      s.initial_route) == s.sailable_routes.end()) {
      add(f + ".initial_route", "must be one of the sailable routes");
    }
  }

  for (int i = 0; i < nl; ++i) {
    const auto& l = inst.lanes[i];
    const std::string f = "lanes[" + std::to_string(i) + "]";
    if (l.id != i) add(f + ".id", "ids must be dense and match position");
    if (!(l.laden_distance > 0)) add(f + ".laden_distance", "must be > 0");
    if (static_cast<int>(l.spot_volume_p1_by_type.size()) != nk ||
        static_cast<int>(l.spot_revenue_p1_by_type.size()) != nk) {
      add(f + ".spot", "one entry per capacity type");
    }
    for (double d : l.spot_volume_p1_by_type) {
      if (d < 0) add(f + ".spot_volume_p1_by_type", "must be >= 0");
    }
    for (double d : l.spot_revenue_p1_by_type) {
      if (d < 0) add(f + ".spot_revenue_p1_by_type", "must be >= 0");
    }
    for (int c : l.contracts_served) {
      if (c < 0 || c >= nc) add(f + ".contracts_served", "references unknown contract " + std::to_string(c));
    }
    for (int v : l.eligible_ships) {
      if (v < 0 || v >= nv) add(f + ".eligible_ships", "references unknown ship " + std::to_string(v));
    }
  }

  for (int c = 0; c < nc; ++c) {
    const auto& con = inst.contracts[c];
    const std::string f = "contracts[" + std::to_string(c) + "]";
    if (con.id != c) add(f + ".id", "ids must be dense and match position");
    if (con.frequency_p1 < 0 || con.frequency_p2 < 0) add(f + ".frequency", "must be >= 0");
    if (con.demand_p1 < 0) add(f + ".demand_p1", "must be >= 0");
    if (con.compatible_capacity_types.empty()) add(f + ".compatible_capacity_types", "must be non-empty");
    for (int k : con.compatible_capacity_types) {
      if (k < 0 || k >= nk) add(f + ".compatible_capacity_types", "references unknown type");
    }
    bool served = false;
    for (const auto& l : inst.lanes) {
      if (std::find(l.contracts_served.begin(), l.contracts_served.end(), c) != l.contracts_served.end())
        served = true;
    }
    if (!served) add(f, "must be served by at least one lane");
  }

  for (int r = 0; r < nr; ++r) {
    const auto& route = inst.routes[r];
    const std::string f = "routes[" + std::to_string(r) + "]";
    if (route.id != r) add(f + ".id", "ids must be dense and match position");
    if (route.lane_sequence.empty()) {
      add(f + ".lane_sequence", "must be non-empty");
      continue;
    }
    bool lanes_ok = true;
    for (int lane : route.lane_sequence) {
      if (lane < 0 || lane >= nl) {
        add(f + ".lane_sequence", "references unknown lane " + std::to_string(lane));
        lanes_ok = false;
      }
    }
    if (!lanes_ok) continue;
    std::set<int> uniq(route.lane_sequence.begin(), route.lane_sequence.end());
    if (uniq.size() != route.lane_sequence.size()) {
      add(f + ".lane_sequence", "lanes must not repeat");
      continue;
    }
    double sum = 0.0;
    for (int lane : route.lane_sequence) sum += inst.lanes[lane].laden_distance;
    if (std::abs(sum - route.lane_length_sum) > 1e-9 * std::max(1.0, sum)) {
      add(f + ".lane_length_sum", "must equal the sum of lane distances");
      continue;
    }
    if (route.total_length < route.lane_length_sum * (1.0 - 1e-12)) {
      add(f + ".total_length", "must be >= lane_length_sum");
      continue;
    }
    const double expected = 1.0 - route.lane_length_sum / route.total_length;
    if (std::abs(expected - route.ballast_ratio) > 1e-9) {
      add(f + ".ballast_ratio", "must equal 1 - lane_length_sum / total_length");
    }
  }

  for (std::size_t p = 0; p < inst.voyage_profiles.size(); ++p) {
    const auto& vp = inst.voyage_profiles[p];
    const std::string f = "voyage_profiles[" + std::to_string(p) + "]";
    if (vp.ship < 0 || vp.ship >= nv || vp.route < 0 || vp.route >= nr || vp.speed < 0 ||
        vp.speed >= static_cast<int>(inst.ships[vp.ship].speeds.size())) {
      add(f, "references unknown ship, route or speed");
      continue;
    }
    if (!(vp.round_trip_days > 0 && vp.round_trip_cost_p1 > 0 && vp.round_trip_emissions > 0)) {
      add(f, "days, cost and emissions must be > 0");
    }
  }
  for (std::size_t p = 0; p < inst.transfer_profiles.size(); ++p) {
    const auto& tp = inst.transfer_profiles[p];
    const std::string f = "transfer_profiles[" + std::to_string(p) + "]";
    if (tp.ship < 0 || tp.ship >= nv || tp.from_route < 0 || tp.from_route >= nr ||
        tp.to_route < 0 || tp.to_route >= nr || tp.speed < 0 ||
        tp.speed >= static_cast<int>(inst.ships[tp.ship].speeds.size())) {
      add(f, "references unknown ship, route or speed");
      continue;
    }
    if (tp.transfer_days < 0 || tp.transfer_cost_p1 < 0 || tp.transfer_emissions < 0 ||
        tp.transfer_distance < 0) {
      add(f, "fields must be >= 0");
    }
    if (tp.from_route == tp.to_route && tp.transfer_distance != 0.0) {
      add(f + ".transfer_distance", "must be zero from a route to itself");
    }
  }

  // Coverage and monotonicity need the indexed lookups; only meaningful once
  // the ids above check out.
  if (out.empty()) {
    for (const auto& s : inst.ships) {
      for (int r : s.sailable_routes) {
        for (std::size_t e = 0; e < s.speeds.size(); ++e) {
          if (!inst.has_voyage(s.id, r, static_cast<int>(e))) {
            add("voyage_profiles", "missing profile for ship " + std::to_string(s.id) +
                                       ", route " + std::to_string(r) + ", speed " +
                                       std::to_string(e));
            continue;
          }
          if (e == 0) continue;
          const auto& lo = inst.voyage(s.id, r, static_cast<int>(e - 1));
          const auto& hi = inst.voyage(s.id, r, static_cast<int>(e));
          if (!(hi.round_trip_days < lo.round_trip_days) ||
              !(hi.round_trip_emissions > lo.round_trip_emissions)) {
            add("voyage_profiles", "days must fall and emissions rise with speed (ship " +
                                       std::to_string(s.id) + ", route " + std::to_string(r) + ")");
          }
        }
      }
    }
  }
  return out;
}

InstanceData restrict_routes(const InstanceData& instance, const std::vector<int>& route_ids) {
  InstanceData out = instance;
  std::set<int> allowed(route_ids.begin(), route_ids.end());
  for (auto& ship : out.ships) {
    std::vector<int> kept;
    for (int r : ship.sailable_routes) {
      if (allowed.count(r) || r == ship.initial_route) kept.push_back(r);
    }
    ship.sailable_routes = std::move(kept);
  }
  out.index_profiles();
  return out;
}

}  // namespace tramp
