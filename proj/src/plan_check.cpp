#include <algorithm>
#include <cmath>
#include <sstream>

#include "tramp/model.hpp"

namespace tramp {

namespace {

std::string tag(const std::string& family, std::initializer_list<int> idx) {
  std::ostringstream os;
  os << family << '[';
  bool first = true;
  for (int x : idx) {
    if (!first) os << ',';
    os << x;
    first = false;
  }
  os << ']';
  return os.str();
}

class Checker {
 public:
  Checker(const DeploymentPlan& plan, const ModelSpec& model, double tol)
      : plan_(plan), inst_(*model.instance), scen_(*model.scenarios), model_(model), tol_(tol) {}

  std::vector<PlanViolation> run();

 private:
  const DeploymentPlan& plan_;
  const InstanceData& inst_;
  const ScenarioSet& scen_;
  const ModelSpec& model_;
  double tol_;
  std::vector<PlanViolation> out_;

  // lhs (sense) rhs, with the residual scaled by the magnitude of the row.
  void le(const std::string& name, double lhs, double rhs, double scale) { report(name, lhs - rhs, rhs, scale); }
  void ge(const std::string& name, double lhs, double rhs, double scale) { report(name, rhs - lhs, rhs, scale); }
  void eq(const std::string& name, double lhs, double rhs, double scale) {
    report(name, std::abs(lhs - rhs), rhs, scale);
  }
  void report(const std::string& name, double excess, double rhs, double scale) {
    const double denom = std::max({1.0, std::abs(rhs), scale});
    if (excess / denom > tol_) out_.push_back({name, excess / denom});
  }

  double g(const VariableRef& r) const { return plan_.get(r); }
  int speeds(int v) const { return static_cast<int>(inst_.ships[v].speeds.size()); }
  std::vector<int> sailable(int v) const {
    auto rv = inst_.ships[v].sailable_routes;
    std::sort(rv.begin(), rv.end());
    return rv;
  }

  void domains();
  void stage(int v, int s);
  void boundary(int v, int s);
  void lanes(int s);
};

void Checker::domains() {
  for (const auto& [ref, value] : plan_.values) {
    const Domain d = domain_of(ref.kind);
    if (value < -tol_) out_.push_back({"domain:" + ref.name(), -value});
    if (d != Domain::continuous && std::abs(value - std::round(value)) > tol_) {
      out_.push_back({"integrality:" + ref.name(), std::abs(value - std::round(value))});
    }
    if (d == Domain::binary && value > 1.0 + tol_) out_.push_back({"binary:" + ref.name(), value - 1.0});
  }
}

void Checker::stage(int v, int s) {
  const bool p1 = s < 0;
  const auto rv = sailable(v);
  const int ne = speeds(v);
  const auto& ship = inst_.ships[v];
  const std::string sfx = p1 ? "_p1" : "_p2";
  auto x = [&](int r, int e) { return g(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s)); };
  auto y = [&](int r) { return g(p1 ? var::y1(v, r) : var::y2(v, r, s)); };
  auto first = [&](int r, int r2, int e) { return g(p1 ? var::y11(v, r, r2, e) : var::y21(v, r, r2, e, s)); };
  auto mid = [&](int r, int r2, int e) { return g(p1 ? var::y12(v, r, r2, e) : var::y22(v, r, r2, e, s)); };
  auto name = [&](const std::string& fam, std::initializer_list<int> idx) {
    std::vector<int> all(idx);
    if (!p1) all.push_back(s);
    std::ostringstream os;
    os << fam << sfx << '[';
    for (std::size_t n = 0; n < all.size(); ++n) os << (n ? "," : "") << all[n];
    os << ']';
    return os.str();
  };

  // Trips only on assigned routes; the big-M is a modelling device.
  for (int r : rv) {
    double trips = 0.0;
    for (int e = 0; e < ne; ++e) trips += x(r, e);
    if (trips > tol_ && y(r) < 1.0 - tol_) out_.push_back({name("route_link", {v, r}), trips});
  }
  for (int r : rv) {
    double sum = 0.0;
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) sum += first(r, r2, e);
    }
    const double start = p1 ? (ship.initial_route == r ? 1.0 : 0.0) : g(var::y2_0(v, r, s));
    eq(name("initial_transfer", {v, r}), sum, start, 1.0);
  }
  for (int r2 : rv) {
    double sum = 0.0;
    for (int r : rv) {
      for (int e = 0; e < ne; ++e) sum += first(r, r2, e);
    }
    ge(name("first_route", {v, r2}), y(r2), sum, 1.0);
  }
  for (int r : rv) {
    for (int r2 : rv) {
      if (r2 == r) continue;
      double sum = 0.0;
      for (int e = 0; e < ne; ++e) sum += mid(r, r2, e);
      le(name("transfer_link", {v, r, r2}), sum, 1.0 - (y(r) - y(r2)), 1.0);
      if (r < r2) {
        for (int e = 0; e < ne; ++e) eq(name("transfer_symmetry", {v, r, r2, e}), mid(r, r2, e), mid(r2, r, e), 1.0);
      }
    }
  }
  double lhs = 0.0, used = 0.0;
  for (int r : rv) {
    used += y(r);
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) {
        lhs += first(r, r2, e);
        if (r2 != r) lhs += 0.5 * mid(r, r2, e);
      }
    }
  }
  eq(name("transfer_tree", {v}), lhs, used, 1.0);

  double days = 0.0;
  for (int r : rv) {
    for (int e = 0; e < ne; ++e) {
      days += inst_.voyage(v, r, e).round_trip_days * x(r, e);
      for (int r2 : rv) {
        const double t = inst_.transfer(v, r, r2, e).transfer_days;
        days += t * first(r, r2, e);
        if (r2 != r) days += 0.5 * t * mid(r, r2, e);
      }
    }
  }
  days += g(p1 ? var::t_ballast_p1(v) : var::t_ballast_p2(v, s));
  days += g(p1 ? var::t_port_p1(v) : var::t_port_p2(v, s));
  eq(name("time_budget", {v}), days, p1 ? ship.available_days_p1 : ship.available_days_p2, 1.0);
}

void Checker::boundary(int v, int s) {
  const auto rv = sailable(v);
  const int ne = speeds(v);
  double total = 0.0;
  for (int r2 : rv) {
    double deg = 0.0;
    for (int r : rv) {
      for (int e = 0; e < ne; ++e) deg += g(var::y11(v, r, r2, e));
    }
    for (int r3 : rv) {
      if (r3 == r2) continue;
      for (int e = 0; e < ne; ++e) deg += g(var::y12(v, r2, r3, e));
    }
    const double y20 = g(var::y2_0(v, r2, s));
    le(tag("stage_boundary_upper", {v, r2, s}), y20, 2.0 - deg, 1.0);
    le(tag("stage_boundary_lower", {v, r2, s}), y20, deg, 1.0);
    total += y20;
  }
  eq(tag("stage_start", {v, s}), total, 1.0, 1.0);
}

void Checker::lanes(int s) {
  const bool p1 = s < 0;
  const std::string sfx = p1 ? "_p1" : "_p2";
  auto name = [&](const std::string& fam, std::initializer_list<int> idx) {
    std::vector<int> all(idx);
    if (!p1) all.push_back(s);
    std::ostringstream os;
    os << fam << sfx << '[';
    for (std::size_t n = 0; n < all.size(); ++n) os << (n ? "," : "") << all[n];
    os << ']';
    return os.str();
  };
  for (std::size_t li = 0; li < inst_.lanes.size(); ++li) {
    const int i = static_cast<int>(li);
    const auto& lane = inst_.lanes[i];
    double trips = 0.0;
    for (int v : lane.eligible_ships) {
      for (int r : inst_.routes_serving(i, v)) {
        for (int e = 0; e < speeds(v); ++e) trips += g(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s));
      }
    }
    for (int c : lane.contracts_served) {
      const auto& con = inst_.contracts[c];
      ge(name("contract_frequency", {i, c}), trips, p1 ? con.frequency_p1 : con.frequency_p2, 1.0);
      double carried = 0.0;
      for (int v : lane.eligible_ships) {
        for (int k : con.compatible_capacity_types) carried += g(p1 ? var::qC_p1(v, i, k, c) : var::qC_p2(v, i, k, c, s));
      }
      eq(name("contract_demand", {i, c}), carried, p1 ? con.demand_p1 : scen_.scenarios[s].demand_p2[c], 1.0);
    }
    for (int k = 0; k < inst_.num_types(); ++k) {
      double spot = 0.0;
      for (int v : lane.eligible_ships) {
        double ship_trips = 0.0;
        for (int r : inst_.routes_serving(i, v)) {
          for (int e = 0; e < speeds(v); ++e) ship_trips += g(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s));
        }
        double load = 0.0;
        for (int c : lane.contracts_served) {
          const auto& kc = inst_.contracts[c].compatible_capacity_types;
          if (std::find(kc.begin(), kc.end(), k) == kc.end()) continue;
          load += g(p1 ? var::qC_p1(v, i, k, c) : var::qC_p2(v, i, k, c, s));
        }
        const double sp = g(p1 ? var::qSP_p1(v, i, k) : var::qSP_p2(v, i, k, s));
        load += sp;
        spot += sp;
        const double cap = inst_.ships[v].capacity_by_type[k] * ship_trips;
        ge(name("capacity", {v, i, k}), cap, load, std::max(cap, load));
      }
      ge(name("spot_limit", {i, k}), p1 ? lane.spot_volume_p1_by_type[k] : scen_.scenarios[s].spot_volume_p2[i][k],
         spot, spot);
    }
  }
}

std::vector<PlanViolation> Checker::run() {
  domains();
  const int nv = static_cast<int>(inst_.ships.size());
  const int ns = static_cast<int>(scen_.scenarios.size());
  for (int v = 0; v < nv; ++v) {
    stage(v, -1);
    for (int s = 0; s < ns; ++s) {
      boundary(v, s);
      stage(v, s);
    }
  }
  lanes(-1);
  for (int s = 0; s < ns; ++s) lanes(s);
  if (model_.mode != CiiMode::none) {
    for (int s = 0; s < ns; ++s) {
      for (int v = 0; v < nv; ++v) {
        const auto b = cii_breakdown(plan_, inst_, v, s);
        const double cii = inst_.ships[v].cii_standard;
        const double slack = model_.options.elastic_cii ? 1e6 * g(var::cii_slack(v, s)) : 0.0;
        if (model_.mode == CiiMode::demand_based) {
          const double rhs = cii * (b.prior_work + b.demand_work) + slack;
          le(tag("cii_demand", {v, s}), b.emissions, rhs, b.emissions);
        } else {
          const double rhs = cii * (b.prior_work + b.capacity_total_work) + slack;
          le(tag("cii_supply", {v, s}), b.emissions, rhs, b.emissions);
        }
      }
    }
  }
  return out_;
}

}  // namespace

std::vector<PlanViolation> check_plan_feasibility(const DeploymentPlan& plan, const ModelSpec& model,
                                                  double tolerance) {
  return Checker(plan, model, tolerance).run();
}

CiiBreakdown cii_breakdown(const DeploymentPlan& plan, const InstanceData& instance, int v, int s) {
  const auto& ship = instance.ships.at(v);
  const int ne = static_cast<int>(ship.speeds.size());
  CiiBreakdown b;
  b.prior_work = ship.prior_work;
  b.emissions = ship.prior_emissions;
  double transfer_distance = 0.0;
  std::vector<double> lane_trips(instance.lanes.size(), 0.0);
  for (int r : ship.sailable_routes) {
    const auto& route = instance.routes[r];
    for (int e = 0; e < ne; ++e) {
      const double trips = plan.get(var::x_p1(v, r, e)) + plan.get(var::x_p2(v, r, e, s));
      b.emissions += instance.voyage(v, r, e).round_trip_emissions * trips;
      b.laden_distance += route.lane_length_sum * trips;
      b.total_distance += route.total_length * trips;
      for (int i : route.lane_sequence) lane_trips[i] += trips;
      for (int r2 : ship.sailable_routes) {
        const auto tp = instance.transfer(v, r, r2, e);
        const double first = plan.get(var::y11(v, r, r2, e)) + plan.get(var::y21(v, r, r2, e, s));
        const double mid = r2 == r ? 0.0 : plan.get(var::y12(v, r, r2, e)) + plan.get(var::y22(v, r, r2, e, s));
        b.emissions += tp.transfer_emissions * (first + 0.5 * mid);
        transfer_distance += tp.transfer_distance * (first + 0.5 * mid);
      }
    }
  }
  const double ballast_days = plan.get(var::t_ballast_p1(v)) + plan.get(var::t_ballast_p2(v, s));
  const double port_days = plan.get(var::t_port_p1(v)) + plan.get(var::t_port_p2(v, s));
  b.emissions += ship.ballast_emission_rate * ballast_days + ship.port_emission_rate * port_days;
  b.total_distance += transfer_distance + ship.ballast_distance_per_day * ballast_days;

  double max_avg_load = 0.0;
  for (std::size_t i = 0; i < instance.lanes.size(); ++i) {
    const auto& lane = instance.lanes[i];
    double tonnes = 0.0;
    for (int k = 0; k < instance.num_types(); ++k) {
      for (int c : lane.contracts_served) {
        tonnes += plan.get(var::qC_p1(v, static_cast<int>(i), k, c)) +
                  plan.get(var::qC_p2(v, static_cast<int>(i), k, c, s));
      }
      tonnes += plan.get(var::qSP_p1(v, static_cast<int>(i), k)) + plan.get(var::qSP_p2(v, static_cast<int>(i), k, s));
    }
    b.demand_work += lane.laden_distance * tonnes;
    if (lane_trips[i] > 0.0) max_avg_load = std::max(max_avg_load, tonnes / lane_trips[i]);
  }
  const double cap = ship.total_capacity();
  b.max_load_work = max_avg_load * b.laden_distance;
  b.capacity_laden_work = cap * b.laden_distance;
  b.capacity_total_work = cap * b.total_distance;
  const double dd = b.prior_work + b.demand_work;
  const double sd = b.prior_work + b.capacity_total_work;
  if (dd > 0.0) b.demand_cii = b.emissions / dd;
  if (sd > 0.0) b.supply_cii = b.emissions / sd;
  return b;
}

std::vector<std::optional<double>> cii_value(const DeploymentPlan& plan, const InstanceData& instance, CiiMode mode,
                                             int scenario) {
  std::vector<std::optional<double>> out;
  for (std::size_t v = 0; v < instance.ships.size(); ++v) {
    const auto b = cii_breakdown(plan, instance, static_cast<int>(v), scenario);
    out.push_back(mode == CiiMode::demand_based ? b.demand_cii : b.supply_cii);
  }
  return out;
}

}  // namespace tramp
