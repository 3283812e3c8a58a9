#include "tramp/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tramp {

using nlohmann::json;

namespace {

json point_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  return json::array({p->x, p->y});
}

std::optional<Point> point_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Point{j.at(0).get<double>(), j.at(1).get<double>()};
}

void require_schema(const json& j, const char* what) {
  if (!j.contains("schema_version")) {
    throw std::runtime_error(std::string(what) + " file has no schema_version");
  }
  const int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw std::runtime_error(std::string(what) + " file has unsupported schema_version " +
                             std::to_string(v));
  }
}

}  // namespace

json instance_to_json(const InstanceData& inst) {
  json ships = json::array();
  for (const auto& s : inst.ships) {
    ships.push_back({{"id", s.id},
                     {"available_days_p1", s.available_days_p1},
                     {"available_days_p2", s.available_days_p2},
                     {"capacity_by_type", s.capacity_by_type},
                     {"prior_emissions", s.prior_emissions},
                     {"prior_work", s.prior_work},
                     {"cii_standard", s.cii_standard},
                     {"ballast_emission_rate", s.ballast_emission_rate},
                     {"port_emission_rate", s.port_emission_rate},
                     {"ballast_cost_rate_p1", s.ballast_cost_rate_p1},
                     {"port_cost_rate_p1", s.port_cost_rate_p1},
                     {"ballast_distance_per_day", s.ballast_distance_per_day},
                     {"initial_route", s.initial_route},
                     {"speeds", s.speeds},
                     {"sailable_routes", s.sailable_routes},
                     {"laden_fuel_per_day", s.laden_fuel_per_day},
                     {"ballast_fuel_per_day", s.ballast_fuel_per_day},
                     {"reference_speed", s.reference_speed}});
  }
  json lanes = json::array();
  for (const auto& l : inst.lanes) {
    lanes.push_back({{"id", l.id},
                     {"laden_distance", l.laden_distance},
                     {"contracts_served", l.contracts_served},
                     {"spot_volume_p1_by_type", l.spot_volume_p1_by_type},
                     {"spot_revenue_p1_by_type", l.spot_revenue_p1_by_type},
                     {"eligible_ships", l.eligible_ships},
                     {"origin", point_json(l.origin)},
                     {"destination", point_json(l.destination)},
                     {"port_call_fee", l.port_call_fee}});
  }
  json routes = json::array();
  for (const auto& r : inst.routes) {
    routes.push_back({{"id", r.id},
                      {"lane_sequence", r.lane_sequence},
                      {"total_length", r.total_length},
                      {"lane_length_sum", r.lane_length_sum},
                      {"ballast_ratio", r.ballast_ratio}});
  }
  json contracts = json::array();
  for (const auto& c : inst.contracts) {
    contracts.push_back({{"id", c.id},
                         {"frequency_p1", c.frequency_p1},
                         {"frequency_p2", c.frequency_p2},
                         {"demand_p1", c.demand_p1},
                         {"compatible_capacity_types", c.compatible_capacity_types}});
  }
  // Profiles are stored column-wise to keep files compact.
  json voyage = {{"ship", json::array()}, {"route", json::array()}, {"speed", json::array()},
                 {"days", json::array()}, {"cost", json::array()}, {"emissions", json::array()}};
  for (const auto& p : inst.voyage_profiles) {
    voyage["ship"].push_back(p.ship);
    voyage["route"].push_back(p.route);
    voyage["speed"].push_back(p.speed);
    voyage["days"].push_back(p.round_trip_days);
    voyage["cost"].push_back(p.round_trip_cost_p1);
    voyage["emissions"].push_back(p.round_trip_emissions);
  }
  json transfer = {{"ship", json::array()},      {"from", json::array()},
                   {"to", json::array()},        {"speed", json::array()},
                   {"days", json::array()},      {"cost", json::array()},
                   {"emissions", json::array()}, {"distance", json::array()}};
  for (const auto& p : inst.transfer_profiles) {
    transfer["ship"].push_back(p.ship);
    transfer["from"].push_back(p.from_route);
    transfer["to"].push_back(p.to_route);
    transfer["speed"].push_back(p.speed);
    transfer["days"].push_back(p.transfer_days);
    transfer["cost"].push_back(p.transfer_cost_p1);
    transfer["emissions"].push_back(p.transfer_emissions);
    transfer["distance"].push_back(p.transfer_distance);
  }
  return json{{"schema_version", kSchemaVersion},
              {"seed", inst.rng_seed},
              {"ships", ships},
              {"lanes", lanes},
              {"routes", routes},
              {"contracts", contracts},
              {"capacity_types", inst.capacity_types},
              {"profiles", {{"voyage", voyage}, {"transfer", transfer}}},
              {"fleet_capacity_covers_demand", inst.fleet_capacity_covers_demand}};
}

InstanceData instance_from_json(const json& j) {
  require_schema(j, "instance");
  InstanceData inst;
  inst.rng_seed = j.value("seed", std::uint64_t{0});
  inst.fleet_capacity_covers_demand = j.value("fleet_capacity_covers_demand", false);
  inst.capacity_types = j.at("capacity_types").get<std::vector<std::string>>();
  for (const auto& s : j.at("ships")) {
    ShipSpec ship;
    ship.id = s.at("id").get<int>();
    ship.available_days_p1 = s.at("available_days_p1").get<double>();
    ship.available_days_p2 = s.at("available_days_p2").get<double>();
    ship.capacity_by_type = s.at("capacity_by_type").get<std::vector<double>>();
    ship.prior_emissions = s.at("prior_emissions").get<double>();
    ship.prior_work = s.at("prior_work").get<double>();
    ship.cii_standard = s.at("cii_standard").get<double>();
    ship.ballast_emission_rate = s.at("ballast_emission_rate").get<double>();
    ship.port_emission_rate = s.at("port_emission_rate").get<double>();
    ship.ballast_cost_rate_p1 = s.at("ballast_cost_rate_p1").get<double>();
    ship.port_cost_rate_p1 = s.at("port_cost_rate_p1").get<double>();
    ship.ballast_distance_per_day = s.at("ballast_distance_per_day").get<double>();
    ship.initial_route = s.at("initial_route").get<int>();
    ship.speeds = s.at("speeds").get<std::vector<double>>();
    ship.sailable_routes = s.at("sailable_routes").get<std::vector<int>>();
    ship.laden_fuel_per_day = s.value("laden_fuel_per_day", 0.0);
    ship.ballast_fuel_per_day = s.value("ballast_fuel_per_day", 0.0);
    ship.reference_speed = s.value("reference_speed", 12.0);
    inst.ships.push_back(std::move(ship));
  }
  for (const auto& l : j.at("lanes")) {
    TradeLaneSpec lane;
    lane.id = l.at("id").get<int>();
    lane.laden_distance = l.at("laden_distance").get<double>();
    lane.contracts_served = l.at("contracts_served").get<std::vector<int>>();
    lane.spot_volume_p1_by_type = l.at("spot_volume_p1_by_type").get<std::vector<double>>();
    lane.spot_revenue_p1_by_type = l.at("spot_revenue_p1_by_type").get<std::vector<double>>();
    lane.eligible_ships = l.at("eligible_ships").get<std::vector<int>>();
    lane.origin = point_from(l.value("origin", json(nullptr)));
    lane.destination = point_from(l.value("destination", json(nullptr)));
    lane.port_call_fee = l.value("port_call_fee", 0.0);
    inst.lanes.push_back(std::move(lane));
  }
  for (const auto& r : j.at("routes")) {
    RouteSpec route;
    route.id = r.at("id").get<int>();
    route.lane_sequence = r.at("lane_sequence").get<std::vector<int>>();
    route.total_length = r.at("total_length").get<double>();
    route.lane_length_sum = r.at("lane_length_sum").get<double>();
    route.ballast_ratio = r.at("ballast_ratio").get<double>();
    inst.routes.push_back(std::move(route));
  }
  for (const auto& c : j.at("contracts")) {
    ContractSpec con;
    con.id = c.at("id").get<int>();
    con.frequency_p1 = c.at("frequency_p1").get<int>();
    con.frequency_p2 = c.at("frequency_p2").get<int>();
    con.demand_p1 = c.at("demand_p1").get<double>();
    con.compatible_capacity_types = c.at("compatible_capacity_types").get<std::vector<int>>();
    inst.contracts.push_back(std::move(con));
  }
  const auto& vp = j.at("profiles").at("voyage");
  const std::size_t nvp = vp.at("ship").size();
  for (std::size_t p = 0; p < nvp; ++p) {
    inst.voyage_profiles.push_back(VoyageProfile{
        vp["ship"][p].get<int>(), vp["route"][p].get<int>(), vp["speed"][p].get<int>(),
        vp["days"][p].get<double>(), vp["cost"][p].get<double>(), vp["emissions"][p].get<double>()});
  }
  const auto& tp = j.at("profiles").at("transfer");
  const std::size_t ntp = tp.at("ship").size();
  for (std::size_t p = 0; p < ntp; ++p) {
    inst.transfer_profiles.push_back(TransferProfile{
        tp["ship"][p].get<int>(), tp["from"][p].get<int>(), tp["to"][p].get<int>(),
        tp["speed"][p].get<int>(), tp["days"][p].get<double>(), tp["cost"][p].get<double>(),
        tp["emissions"][p].get<double>(), tp["distance"][p].get<double>()});
  }
  inst.index_profiles();
  return inst;
}

json scenarios_to_json(const ScenarioSet& set) {
  json arr = json::array();
  for (const auto& s : set.scenarios) {
    arr.push_back({{"id", s.id},
                   {"directions",
                    {{"fuel_price", to_string(s.directions.fuel_price)},
                     {"market_demand", to_string(s.directions.market_demand)},
                     {"freight_rate", to_string(s.directions.freight_rate)}}},
                   {"probability", s.probability},
                   {"demand_p2", s.demand_p2},
                   {"spot_volume_p2", s.spot_volume_p2},
                   {"spot_revenue_p2", s.spot_revenue_p2},
                   {"voyage_cost_multiplier", s.voyage_cost_multiplier},
                   {"transfer_cost_multiplier", s.transfer_cost_multiplier},
                   {"ballast_cost_multiplier", s.ballast_cost_multiplier},
                   {"port_cost_multiplier", s.port_cost_multiplier},
                   {"base_id", s.base_id}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"instance_hash", set.instance_hash},
              {"base_count", set.base_count},
              {"expansion",
               {{"variants_per_base", set.expansion.variants_per_base},
                {"amplitude", set.expansion.amplitude},
                {"seed", set.expansion.seed}}},
              {"scenarios", arr}};
}

ScenarioSet scenarios_from_json(const json& j) {
  require_schema(j, "scenario");
  ScenarioSet set;
  set.instance_hash = j.value("instance_hash", std::string());
  set.base_count = j.value("base_count", 0);
  if (j.contains("expansion")) {
    const auto& e = j["expansion"];
    set.expansion.variants_per_base = e.value("variants_per_base", 0);
    set.expansion.amplitude = e.value("amplitude", 0.0);
    set.expansion.seed = e.value("seed", std::uint64_t{0});
  }
  for (const auto& s : j.at("scenarios")) {
    Scenario sc;
    sc.id = s.at("id").get<int>();
    const auto& d = s.at("directions");
    sc.directions.fuel_price = direction_from_string(d.at("fuel_price").get<std::string>());
    sc.directions.market_demand = direction_from_string(d.at("market_demand").get<std::string>());
    sc.directions.freight_rate = direction_from_string(d.at("freight_rate").get<std::string>());
    sc.probability = s.at("probability").get<double>();
    sc.demand_p2 = s.at("demand_p2").get<std::vector<double>>();
    sc.spot_volume_p2 = s.at("spot_volume_p2").get<std::vector<std::vector<double>>>();
    sc.spot_revenue_p2 = s.at("spot_revenue_p2").get<std::vector<std::vector<double>>>();
    sc.voyage_cost_multiplier = s.at("voyage_cost_multiplier").get<std::vector<double>>();
    sc.transfer_cost_multiplier = s.at("transfer_cost_multiplier").get<std::vector<double>>();
    sc.ballast_cost_multiplier = s.at("ballast_cost_multiplier").get<std::vector<double>>();
    sc.port_cost_multiplier = s.at("port_cost_multiplier").get<std::vector<double>>();
    sc.base_id = s.value("base_id", -1);
    set.scenarios.push_back(std::move(sc));
  }
  return set;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string content_hash(const InstanceData& instance) {
  return sha256_hex(instance_to_json(instance).dump());
}

std::string content_hash(const ScenarioSet& set) { return sha256_hex(scenarios_to_json(set).dump()); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("cannot move '" + tmp + "' into place: " + ec.message());
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace tramp
