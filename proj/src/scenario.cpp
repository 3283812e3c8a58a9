#include "tramp/scenario.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tramp/io.hpp"

namespace tramp {

double scaling_multiplier(Direction d) {
  switch (d) {
    case Direction::up:
      return 1.2;
    case Direction::down:
      return 0.8;
    case Direction::flat:
      break;
  }
  return 1.0;
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::up:
      return "up";
    case Direction::down:
      return "down";
    case Direction::flat:
      break;
  }
  return "flat";
}

Direction direction_from_string(const std::string& s) {
  if (s == "up") return Direction::up;
  if (s == "down") return Direction::down;
  if (s == "flat") return Direction::flat;
  throw std::invalid_argument("unknown direction '" + s + "'");
}

double Scenario::voyage_cost(const InstanceData& inst, int ship, int route, int speed) const {
  return inst.voyage(ship, route, speed).round_trip_cost_p1 * voyage_cost_multiplier.at(ship);
}

double Scenario::transfer_cost(const InstanceData& inst, int ship, int from, int to,
                               int speed) const {
  return inst.transfer(ship, from, to, speed).transfer_cost_p1 * transfer_cost_multiplier.at(ship);
}

double Scenario::ballast_cost_rate(const InstanceData& inst, int ship) const {
  return inst.ships.at(ship).ballast_cost_rate_p1 * ballast_cost_multiplier.at(ship);
}

double Scenario::port_cost_rate(const InstanceData& inst, int ship) const {
  return inst.ships.at(ship).port_cost_rate_p1 * port_cost_multiplier.at(ship);
}

std::vector<FactorDirection> base_directions() {
  using D = Direction;
  return {
      {D::flat, D::flat, D::flat}, {D::flat, D::up, D::up},     {D::flat, D::down, D::down},
      {D::up, D::flat, D::up},     {D::up, D::up, D::up},       {D::up, D::down, D::flat},
      {D::up, D::down, D::up},     {D::up, D::down, D::down},   {D::down, D::flat, D::down},
      {D::down, D::up, D::flat},   {D::down, D::up, D::up},     {D::down, D::up, D::down},
      {D::down, D::down, D::down},
  };
}

bool admissible(const FactorDirection& d) {
  const int f = static_cast<int>(d.fuel_price);
  const int m = static_cast<int>(d.market_demand);
  const int r = static_cast<int>(d.freight_rate);
  // Opposing fuel and demand moves leave the freight rate free.
  if (f * m == -1) return true;
  int forced = 0;
  if (f > 0 || m > 0) forced = 1;
  if (f < 0 || m < 0) forced = -1;
  return r == forced;
}

Scenario apply_scaling(const InstanceData& instance, const FactorDirection& directions,
                       const ScalingOptions& options) {
  Scenario s;
  s.directions = directions;
  const double fuel = 1.0 + options.fuel_share * (scaling_multiplier(directions.fuel_price) - 1.0);
  const double demand = scaling_multiplier(directions.market_demand);
  const double freight = scaling_multiplier(directions.freight_rate);
  for (const auto& c : instance.contracts) s.demand_p2.push_back(c.demand_p1 * demand);
  for (const auto& lane : instance.lanes) {
    std::vector<double> vol, rev;
    for (double d : lane.spot_volume_p1_by_type) vol.push_back(d * demand);
    for (double r : lane.spot_revenue_p1_by_type) rev.push_back(r * freight);
    s.spot_volume_p2.push_back(std::move(vol));
    s.spot_revenue_p2.push_back(std::move(rev));
  }
  const std::size_t nv = instance.ships.size();
  s.voyage_cost_multiplier.assign(nv, fuel);
  s.transfer_cost_multiplier.assign(nv, fuel);
  s.ballast_cost_multiplier.assign(nv, fuel);
  s.port_cost_multiplier.assign(nv, fuel);
  return s;
}

ScenarioSet build_base_scenarios(const InstanceData& instance, const ScalingOptions& options) {
  ScenarioSet set;
  const auto dirs = base_directions();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    Scenario s = apply_scaling(instance, dirs[i], options);
    s.id = static_cast<int>(i);
    s.probability = 1.0 / static_cast<double>(dirs.size());
    set.scenarios.push_back(std::move(s));
  }
  set.base_count = static_cast<int>(dirs.size());
  set.instance_hash = content_hash(instance);
  return set;
}

CorrelationMatrix factor_correlations(const ScenarioSet& set) {
  if (set.scenarios.size() < 2) {
    throw std::invalid_argument("factor_correlations: need at least two scenarios");
  }
  CorrelationMatrix out;
  const std::size_t n = set.scenarios.size();
  auto code = [&](std::size_t s, int f) {
    const auto& d = set.scenarios[s].directions;
    const Direction x = f == 0 ? d.fuel_price : (f == 1 ? d.market_demand : d.freight_rate);
    return static_cast<int>(x);
  };
  bool equal = true;
  for (const auto& s : set.scenarios) {
    if (std::abs(s.probability - set.scenarios[0].probability) > 1e-15) equal = false;
  }
  std::array<std::array<double, 3>, 3> cov{};
  if (equal) {
    // Integer moments keep the equal-probability case exact.
    std::array<long long, 3> sum{};
    std::array<std::array<long long, 3>, 3> cross{};
    for (std::size_t s = 0; s < n; ++s) {
      for (int a = 0; a < 3; ++a) {
        sum[a] += code(s, a);
        for (int b = 0; b < 3; ++b) cross[a][b] += code(s, a) * code(s, b);
      }
    }
    const long long nn = static_cast<long long>(n);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) cov[a][b] = static_cast<double>(nn * cross[a][b] - sum[a] * sum[b]);
    }
  } else {
    std::array<double, 3> mean{};
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      total += set.scenarios[s].probability;
      for (int a = 0; a < 3; ++a) mean[a] += set.scenarios[s].probability * code(s, a);
    }
    if (!(total > 0.0)) throw std::invalid_argument("factor_correlations: zero total probability");
    for (auto& m : mean) m /= total;
    for (std::size_t s = 0; s < n; ++s) {
      const double p = set.scenarios[s].probability / total;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) cov[a][b] += p * (code(s, a) - mean[a]) * (code(s, b) - mean[b]);
      }
    }
  }
  for (int a = 0; a < 3; ++a) out.zero_variance[a] = !(cov[a][a] > 1e-15);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (out.zero_variance[a] || out.zero_variance[b]) {
        out.defined[a][b] = false;
        out.value[a][b] = std::nan("");
        continue;
      }
      out.defined[a][b] = true;
      out.value[a][b] = a == b ? 1.0 : cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]);
    }
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ScenarioSet expand_scenarios(const ScenarioSet& base, int variants_per_base, double amplitude,
                             std::uint64_t seed) {
  if (variants_per_base < 1) throw std::invalid_argument("expand_scenarios: variants_per_base must be >= 1");
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw std::invalid_argument("expand_scenarios: amplitude must lie in [0, 1)");
  }
  ScenarioSet out;
  out.base_count = base.base_count > 0 ? base.base_count : static_cast<int>(base.size());
  out.expansion = ExpansionInfo{variants_per_base, amplitude, seed};
  out.instance_hash = base.instance_hash;
  for (const auto& s : base.scenarios) out.scenarios.push_back(s);
  for (std::size_t b = 0; b < base.scenarios.size(); ++b) {
    for (int k = 0; k < variants_per_base; ++k) {
      Scenario v = base.scenarios[b];
      const std::uint64_t stream =
          splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(b) * 1000003ULL + k));
      std::mt19937_64 rng(stream);
      std::uniform_real_distribution<double> draw(1.0 - amplitude, 1.0 + amplitude);
      auto jitter = [&](double x) { return amplitude == 0.0 ? x : x * draw(rng); };
      for (auto& d : v.demand_p2) d = jitter(d);
      for (auto& row : v.spot_volume_p2)
        for (auto& d : row) d = jitter(d);
      for (auto& row : v.spot_revenue_p2)
        for (auto& d : row) d = jitter(d);
      for (auto& m : v.voyage_cost_multiplier) m = jitter(m);
      for (auto& m : v.transfer_cost_multiplier) m = jitter(m);
      for (auto& m : v.ballast_cost_multiplier) m = jitter(m);
      for (auto& m : v.port_cost_multiplier) m = jitter(m);
      v.base_id = base.scenarios[b].id;
      out.scenarios.push_back(std::move(v));
    }
  }
  const double p = 1.0 / static_cast<double>(out.scenarios.size());
  for (std::size_t i = 0; i < out.scenarios.size(); ++i) {
    out.scenarios[i].id = static_cast<int>(i);
    out.scenarios[i].probability = p;
  }
  return out;
}

Scenario mean_scenario(const ScenarioSet& set) {
  if (set.scenarios.empty()) throw std::invalid_argument("mean_scenario: empty scenario set");
  Scenario m = set.scenarios.front();
  m.id = 0;
  m.base_id = -1;
  m.probability = 1.0;
  m.directions = FactorDirection{};
  auto zero = [](auto& v) {
    for (auto& x : v) x = 0.0;
  };
  zero(m.demand_p2);
  for (auto& row : m.spot_volume_p2) zero(row);
  for (auto& row : m.spot_revenue_p2) zero(row);
  zero(m.voyage_cost_multiplier);
  zero(m.transfer_cost_multiplier);
  zero(m.ballast_cost_multiplier);
  zero(m.port_cost_multiplier);
  double total = 0.0;
  for (const auto& s : set.scenarios) total += s.probability;
  for (const auto& s : set.scenarios) {
    const double p = s.probability / total;
    for (std::size_t c = 0; c < m.demand_p2.size(); ++c) m.demand_p2[c] += p * s.demand_p2[c];
    for (std::size_t i = 0; i < m.spot_volume_p2.size(); ++i) {
      for (std::size_t k = 0; k < m.spot_volume_p2[i].size(); ++k) {
        m.spot_volume_p2[i][k] += p * s.spot_volume_p2[i][k];
        m.spot_revenue_p2[i][k] += p * s.spot_revenue_p2[i][k];
      }
    }
    for (std::size_t v = 0; v < m.voyage_cost_multiplier.size(); ++v) {
      m.voyage_cost_multiplier[v] += p * s.voyage_cost_multiplier[v];
      m.transfer_cost_multiplier[v] += p * s.transfer_cost_multiplier[v];
      m.ballast_cost_multiplier[v] += p * s.ballast_cost_multiplier[v];
      m.port_cost_multiplier[v] += p * s.port_cost_multiplier[v];
    }
  }
  return m;
}

ScenarioSet single_scenario_set(const Scenario& scenario, const std::string& instance_hash) {
  ScenarioSet out;
  Scenario s = scenario;
  s.id = 0;
  s.probability = 1.0;
  out.scenarios.push_back(std::move(s));
  out.base_count = 1;
  out.instance_hash = instance_hash;
  return out;
}

ScenarioSet single_scenario_set(const ScenarioSet& set, int index) {
  return single_scenario_set(set.scenarios.at(index), set.instance_hash);
}

std::vector<std::string> check_scenarios(const InstanceData& instance, const ScenarioSet& set) {
  std::vector<std::string> out;
  if (set.scenarios.empty()) out.push_back("scenario set is empty");
  double total = 0.0;
  const std::size_t nl = instance.lanes.size();
  const std::size_t nk = instance.capacity_types.size();
  const std::size_t nv = instance.ships.size();
  for (std::size_t i = 0; i < set.scenarios.size(); ++i) {
    const auto& s = set.scenarios[i];
    const std::string tag = "scenario " + std::to_string(i) + ": ";
    if (s.id != static_cast<int>(i)) out.push_back(tag + "ids must be dense");
    if (s.probability < 0.0) out.push_back(tag + "negative probability");
    total += s.probability;
    if (s.demand_p2.size() != instance.contracts.size()) out.push_back(tag + "demand_p2 size mismatch");
    if (s.spot_volume_p2.size() != nl || s.spot_revenue_p2.size() != nl) {
      out.push_back(tag + "spot table lane count mismatch");
    } else {
      for (std::size_t l = 0; l < nl; ++l) {
        if (s.spot_volume_p2[l].size() != nk || s.spot_revenue_p2[l].size() != nk) {
          out.push_back(tag + "spot table type count mismatch");
        }
        for (double d : s.spot_volume_p2[l])
          if (d < 0) out.push_back(tag + "negative spot volume");
        for (double d : s.spot_revenue_p2[l])
          if (d < 0) out.push_back(tag + "negative spot revenue");
      }
    }
    for (double d : s.demand_p2)
      if (d < 0) out.push_back(tag + "negative demand");
    for (const auto* m : {&s.voyage_cost_multiplier, &s.transfer_cost_multiplier,
                          &s.ballast_cost_multiplier, &s.port_cost_multiplier}) {
      if (m->size() != nv) out.push_back(tag + "cost multiplier size mismatch");
      for (double x : *m)
        if (x < 0) out.push_back(tag + "negative cost multiplier");
    }
  }
  if (!set.scenarios.empty() && std::abs(total - 1.0) > 1e-12) {
    out.push_back("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  return out;
}

}  // namespace tramp
