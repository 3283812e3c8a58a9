#include "tramp/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tramp {

const char* to_string(CiiMode mode) {
  switch (mode) {
    case CiiMode::demand_based:
      return "demand_based";
    case CiiMode::supply_based:
      return "supply_based";
    case CiiMode::none:
      break;
  }
  return "none";
}

CiiMode cii_mode_from_string(const std::string& s) {
  if (s == "demand" || s == "demand_based") return CiiMode::demand_based;
  if (s == "supply" || s == "supply_based") return CiiMode::supply_based;
  if (s == "none") return CiiMode::none;
  throw std::invalid_argument("unknown CII mode '" + s + "'");
}

const char* to_string(VarKind kind) {
  switch (kind) {
    case VarKind::x_p1:
      return "x_p1";
    case VarKind::x_p2:
      return "x_p2";
    case VarKind::y1:
      return "y1";
    case VarKind::y2:
      return "y2";
    case VarKind::y2_0:
      return "y2_0";
    case VarKind::y11:
      return "y11";
    case VarKind::y21:
      return "y21";
    case VarKind::y12:
      return "y12";
    case VarKind::y22:
      return "y22";
    case VarKind::qC_p1:
      return "qC_p1";
    case VarKind::qC_p2:
      return "qC_p2";
    case VarKind::qSP_p1:
      return "qSP_p1";
    case VarKind::qSP_p2:
      return "qSP_p2";
    case VarKind::t_ballast_p1:
      return "t_ballast_p1";
    case VarKind::t_ballast_p2:
      return "t_ballast_p2";
    case VarKind::t_port_p1:
      return "t_port_p1";
    case VarKind::t_port_p2:
      return "t_port_p2";
    case VarKind::cii_slack:
      break;
  }
  return "cii_slack";
}

Domain domain_of(VarKind kind) {
  switch (kind) {
    case VarKind::x_p1:
    case VarKind::x_p2:
      return Domain::integer;
    case VarKind::y1:
    case VarKind::y2:
    case VarKind::y2_0:
    case VarKind::y11:
    case VarKind::y21:
    case VarKind::y12:
    case VarKind::y22:
      return Domain::binary;
    default:
      return Domain::continuous;
  }
}

bool is_first_stage(VarKind kind) {
  switch (kind) {
    case VarKind::x_p1:
    case VarKind::y1:
    case VarKind::y11:
    case VarKind::y12:
    case VarKind::qC_p1:
    case VarKind::qSP_p1:
    case VarKind::t_ballast_p1:
    case VarKind::t_port_p1:
      return true;
    default:
      return false;
  }
}

std::string VariableRef::name() const {
  std::string out = to_string(kind);
  out += '[';
  bool first = true;
  for (int idx : {v, r, r2, e, i, k, c, s}) {
    if (idx < 0) continue;
    if (!first) out += ',';
    out += std::to_string(idx);
    first = false;
  }
  out += ']';
  return out;
}

namespace var {
namespace {
VariableRef make(VarKind kind) {
  VariableRef ref;
  ref.kind = kind;
  return ref;
}
}  // namespace

VariableRef x_p1(int v, int r, int e) {
  auto ref = make(VarKind::x_p1);
  ref.v = v, ref.r = r, ref.e = e;
  return ref;
}
VariableRef x_p2(int v, int r, int e, int s) {
  auto ref = make(VarKind::x_p2);
  ref.v = v, ref.r = r, ref.e = e, ref.s = s;
  return ref;
}
VariableRef y1(int v, int r) {
  auto ref = make(VarKind::y1);
  ref.v = v, ref.r = r;
  return ref;
}
VariableRef y2(int v, int r, int s) {
  auto ref = make(VarKind::y2);
  ref.v = v, ref.r = r, ref.s = s;
  return ref;
}
VariableRef y2_0(int v, int r, int s) {
  auto ref = make(VarKind::y2_0);
  ref.v = v, ref.r = r, ref.s = s;
  return ref;
}
VariableRef y11(int v, int r, int r2, int e) {
  auto ref = make(VarKind::y11);
  ref.v = v, ref.r = r, ref.r2 = r2, ref.e = e;
  return ref;
}
VariableRef y21(int v, int r, int r2, int e, int s) {
  auto ref = make(VarKind::y21);
  ref.v = v, ref.r = r, ref.r2 = r2, ref.e = e, ref.s = s;
  return ref;
}
VariableRef y12(int v, int r, int r2, int e) {
  auto ref = make(VarKind::y12);
  ref.v = v, ref.r = r, ref.r2 = r2, ref.e = e;
  return ref;
}
VariableRef y22(int v, int r, int r2, int e, int s) {
  auto ref = make(VarKind::y22);
  ref.v = v, ref.r = r, ref.r2 = r2, ref.e = e, ref.s = s;
  return ref;
}
VariableRef qC_p1(int v, int i, int k, int c) {
  auto ref = make(VarKind::qC_p1);
  ref.v = v, ref.i = i, ref.k = k, ref.c = c;
  return ref;
}
VariableRef qC_p2(int v, int i, int k, int c, int s) {
  auto ref = make(VarKind::qC_p2);
  ref.v = v, ref.i = i, ref.k = k, ref.c = c, ref.s = s;
  return ref;
}
VariableRef qSP_p1(int v, int i, int k) {
  auto ref = make(VarKind::qSP_p1);
  ref.v = v, ref.i = i, ref.k = k;
  return ref;
}
VariableRef qSP_p2(int v, int i, int k, int s) {
  auto ref = make(VarKind::qSP_p2);
  ref.v = v, ref.i = i, ref.k = k, ref.s = s;
  return ref;
}
VariableRef t_ballast_p1(int v) {
  auto ref = make(VarKind::t_ballast_p1);
  ref.v = v;
  return ref;
}
VariableRef t_ballast_p2(int v, int s) {
  auto ref = make(VarKind::t_ballast_p2);
  ref.v = v, ref.s = s;
  return ref;
}
VariableRef t_port_p1(int v) {
  auto ref = make(VarKind::t_port_p1);
  ref.v = v;
  return ref;
}
VariableRef t_port_p2(int v, int s) {
  auto ref = make(VarKind::t_port_p2);
  ref.v = v, ref.s = s;
  return ref;
}
VariableRef cii_slack(int v, int s) {
  auto ref = make(VarKind::cii_slack);
  ref.v = v, ref.s = s;
  return ref;
}
}  // namespace var

std::string ConstraintSpec::name() const {
  std::string out = family;
  out += '[';
  for (std::size_t n = 0; n < indices.size(); ++n) {
    if (n > 0) out += ',';
    out += std::to_string(indices[n]);
  }
  out += ']';
  return out;
}

int ModelSpec::find(const VariableRef& ref) const {
  auto it = index.find(ref);
  return it == index.end() ? -1 : it->second;
}

int ModelSpec::count(VarKind kind) const {
  return static_cast<int>(std::count_if(variables.begin(), variables.end(),
                                        [kind](const ModelVariable& mv) { return mv.ref.kind == kind; }));
}

int ModelSpec::count_family_prefix(const std::string& prefix) const {
  return static_cast<int>(std::count_if(constraints.begin(), constraints.end(), [&](const ConstraintSpec& c) {
    return c.family.compare(0, prefix.size(), prefix) == 0;
  }));
}

double DeploymentPlan::get(const VariableRef& ref) const {
  auto it = values.find(ref);
  return it == values.end() ? 0.0 : it->second;
}

void DeploymentPlan::set(const VariableRef& ref, double value) { values[ref] = value; }

namespace {

using Terms = std::vector<std::pair<int, double>>;

class Builder {
 public:
  Builder(ModelSpec& m) : m_(m), inst_(*m.instance), scen_(*m.scenarios) {}

  void run();

 private:
  ModelSpec& m_;
  const InstanceData& inst_;
  const ScenarioSet& scen_;

  int add_var(const VariableRef& ref, double lb, double ub, double cost, double revenue = 0.0) {
    ModelVariable mv;
    mv.ref = ref;
    mv.domain = domain_of(ref.kind);
    mv.lb = lb;
    mv.ub = mv.domain == Domain::binary ? std::min(ub, 1.0) : ub;
    mv.cost = cost;
    mv.revenue = revenue;
    const int pos = static_cast<int>(m_.variables.size());
    m_.variables.push_back(mv);
    m_.index.emplace(ref, pos);
    return pos;
  }
  int at(const VariableRef& ref) const {
    const int p = m_.find(ref);
    if (p < 0) throw std::logic_error("model builder: missing variable " + ref.name());
    return p;
  }
  void add_row(std::string family, std::vector<int> indices, Terms terms, Sense sense, double rhs) {
    Terms merged;
    std::sort(terms.begin(), terms.end());
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().first == t.first) {
        merged.back().second += t.second;
      } else {
        merged.push_back(t);
      }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& t) { return t.second == 0.0; }),
                 merged.end());
    if (merged.empty()) {
      const bool ok = (sense == Sense::le && 0.0 <= rhs) || (sense == Sense::ge && 0.0 >= rhs) ||
                      (sense == Sense::eq && rhs == 0.0);
      if (ok) return;
    }
    ConstraintSpec c;
    c.family = std::move(family);
    c.indices = std::move(indices);
    c.terms = std::move(merged);
    c.sense = sense;
    c.rhs = rhs;
    m_.constraints.push_back(std::move(c));
  }

  int num_speeds(int v) const { return static_cast<int>(inst_.ships[v].speeds.size()); }
  int num_scen() const { return static_cast<int>(scen_.scenarios.size()); }

  void index_sets();
  void variables();
  void routing_rows(int v, int s);
  void boundary_rows(int v, int s);
  void time_rows(int v, int s);
  void contract_rows();
  void capacity_rows();
  void cii_rows(int v, int s);
};

void Builder::index_sets() {
  const int nv = static_cast<int>(inst_.ships.size());
  const int ni = static_cast<int>(inst_.lanes.size());
  m_.routes_of_ship.assign(nv, {});
  for (int v = 0; v < nv; ++v) {
    auto rv = inst_.ships[v].sailable_routes;
    std::sort(rv.begin(), rv.end());
    m_.routes_of_ship[v] = rv;
  }
  m_.ships_of_lane.assign(ni, {});
  m_.lane_routes.assign(ni, std::vector<std::vector<int>>(nv));
  for (int i = 0; i < ni; ++i) {
    auto vi = inst_.lanes[i].eligible_ships;
    std::sort(vi.begin(), vi.end());
    m_.ships_of_lane[i] = vi;
    for (int v : vi) m_.lane_routes[i][v] = inst_.routes_serving(i, v);
  }
  m_.contracts_of_type.assign(inst_.num_types(), {});
  for (const auto& c : inst_.contracts) {
    for (int k : c.compatible_capacity_types) m_.contracts_of_type[k].push_back(c.id);
  }
  for (auto& list : m_.contracts_of_type) std::sort(list.begin(), list.end());

  m_.big_m_p1.assign(nv, 0.0);
  m_.big_m_p2.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    double fastest = kInf;
    for (int r : m_.routes_of_ship[v]) {
      for (int e = 0; e < num_speeds(v); ++e) fastest = std::min(fastest, inst_.voyage(v, r, e).round_trip_days);
    }
    if (!std::isfinite(fastest) || fastest <= 0.0) continue;
    m_.big_m_p1[v] = std::ceil(inst_.ships[v].available_days_p1 / fastest) + 1.0;
    m_.big_m_p2[v] = std::ceil(inst_.ships[v].available_days_p2 / fastest) + 1.0;
  }
}

void Builder::variables() {
  const int nv = static_cast<int>(inst_.ships.size());
  const int ns = num_scen();
  for (int v = 0; v < nv; ++v) {
    const auto& ship = inst_.ships[v];
    const auto& rv = m_.routes_of_ship[v];
    const int ne = num_speeds(v);
    for (int r : rv) {
      for (int e = 0; e < ne; ++e) add_var(var::x_p1(v, r, e), 0.0, m_.big_m_p1[v], inst_.voyage(v, r, e).round_trip_cost_p1);
    }
    for (int r : rv) add_var(var::y1(v, r), 0.0, 1.0, 0.0);
    for (int r : rv) {
      for (int r2 : rv) {
        for (int e = 0; e < ne; ++e) add_var(var::y11(v, r, r2, e), 0.0, 1.0, inst_.transfer(v, r, r2, e).transfer_cost_p1);
      }
    }
    for (int r : rv) {
      for (int r2 : rv) {
        if (r2 == r) continue;
        for (int e = 0; e < ne; ++e) {
          add_var(var::y12(v, r, r2, e), 0.0, 1.0, 0.5 * inst_.transfer(v, r, r2, e).transfer_cost_p1);
        }
      }
    }
    add_var(var::t_ballast_p1(v), 0.0, ship.available_days_p1, ship.ballast_cost_rate_p1);
    add_var(var::t_port_p1(v), 0.0, ship.available_days_p1, ship.port_cost_rate_p1);
  }
  for (int v = 0; v < nv; ++v) {
    for (std::size_t i = 0; i < inst_.lanes.size(); ++i) {
      const auto& lane = inst_.lanes[i];
      if (!std::binary_search(m_.ships_of_lane[i].begin(), m_.ships_of_lane[i].end(), v)) continue;
      for (int k = 0; k < inst_.num_types(); ++k) {
        for (int c : lane.contracts_served) {
          const auto& kc = inst_.contracts[c].compatible_capacity_types;
          if (std::find(kc.begin(), kc.end(), k) == kc.end()) continue;
          add_var(var::qC_p1(v, static_cast<int>(i), k, c), 0.0, inst_.contracts[c].demand_p1, 0.0);
        }
        add_var(var::qSP_p1(v, static_cast<int>(i), k), 0.0, lane.spot_volume_p1_by_type[k], 0.0,
                lane.spot_revenue_p1_by_type[k]);
      }
    }
  }

  for (int s = 0; s < ns; ++s) {
    const auto& sc = scen_.scenarios[s];
    const double p = sc.probability;
    for (int v = 0; v < nv; ++v) {
      const auto& ship = inst_.ships[v];
      const auto& rv = m_.routes_of_ship[v];
      const int ne = num_speeds(v);
      for (int r : rv) {
        for (int e = 0; e < ne; ++e) add_var(var::x_p2(v, r, e, s), 0.0, m_.big_m_p2[v], p * sc.voyage_cost(inst_, v, r, e));
      }
      for (int r : rv) add_var(var::y2(v, r, s), 0.0, 1.0, 0.0);
      for (int r : rv) add_var(var::y2_0(v, r, s), 0.0, 1.0, 0.0);
      for (int r : rv) {
        for (int r2 : rv) {
          for (int e = 0; e < ne; ++e) add_var(var::y21(v, r, r2, e, s), 0.0, 1.0, p * sc.transfer_cost(inst_, v, r, r2, e));
        }
      }
      for (int r : rv) {
        for (int r2 : rv) {
          if (r2 == r) continue;
          for (int e = 0; e < ne; ++e) {
            add_var(var::y22(v, r, r2, e, s), 0.0, 1.0, 0.5 * p * sc.transfer_cost(inst_, v, r, r2, e));
          }
        }
      }
      add_var(var::t_ballast_p2(v, s), 0.0, ship.available_days_p2, p * sc.ballast_cost_rate(inst_, v));
      add_var(var::t_port_p2(v, s), 0.0, ship.available_days_p2, p * sc.port_cost_rate(inst_, v));
    }
    for (int v = 0; v < nv; ++v) {
      for (std::size_t i = 0; i < inst_.lanes.size(); ++i) {
        const auto& lane = inst_.lanes[i];
        if (!std::binary_search(m_.ships_of_lane[i].begin(), m_.ships_of_lane[i].end(), v)) continue;
        for (int k = 0; k < inst_.num_types(); ++k) {
          for (int c : lane.contracts_served) {
            const auto& kc = inst_.contracts[c].compatible_capacity_types;
            if (std::find(kc.begin(), kc.end(), k) == kc.end()) continue;
            add_var(var::qC_p2(v, static_cast<int>(i), k, c, s), 0.0, sc.demand_p2[c], 0.0);
          }
          add_var(var::qSP_p2(v, static_cast<int>(i), k, s), 0.0, sc.spot_volume_p2[i][k], 0.0,
                  p * sc.spot_revenue_p2[i][k]);
        }
      }
    }
  }
  if (m_.options.elastic_cii && m_.mode != CiiMode::none) {
    for (int s = 0; s < ns; ++s) {
      for (int v = 0; v < nv; ++v) {
        add_var(var::cii_slack(v, s), 0.0, kInf, scen_.scenarios[s].probability * m_.options.elastic_penalty);
      }
    }
  }
}

// Route activation, transfer structure and tree identity of one stage; s < 0
// selects P-1.
void Builder::routing_rows(int v, int s) {
  const bool p1 = s < 0;
  const auto& rv = m_.routes_of_ship[v];
  const int ne = num_speeds(v);
  const std::string sfx = p1 ? "_p1" : "_p2";
  auto vidx = [&](std::vector<int> idx) {
    if (!p1) idx.push_back(s);
    return idx;
  };
  auto x = [&](int r, int e) { return at(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s)); };
  auto y = [&](int r) { return at(p1 ? var::y1(v, r) : var::y2(v, r, s)); };
  auto first = [&](int r, int r2, int e) { return at(p1 ? var::y11(v, r, r2, e) : var::y21(v, r, r2, e, s)); };
  auto mid = [&](int r, int r2, int e) { return at(p1 ? var::y12(v, r, r2, e) : var::y22(v, r, r2, e, s)); };
  const double big_m = p1 ? m_.big_m_p1[v] : m_.big_m_p2[v];

  for (int r : rv) {
    Terms t;
    for (int e = 0; e < ne; ++e) t.emplace_back(x(r, e), 1.0);
    t.emplace_back(y(r), -big_m);
    add_row("route_link" + sfx, vidx({v, r}), std::move(t), Sense::le, 0.0);
  }
  for (int r : rv) {
    Terms t;
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) t.emplace_back(first(r, r2, e), 1.0);
    }
    double rhs = 0.0;
    if (p1) {
      rhs = inst_.ships[v].initial_route == r ? 1.0 : 0.0;
    } else {
      t.emplace_back(at(var::y2_0(v, r, s)), -1.0);
    }
    add_row("initial_transfer" + sfx, vidx({v, r}), std::move(t), Sense::eq, rhs);
  }
  for (int r2 : rv) {
    Terms t;
    for (int r : rv) {
      for (int e = 0; e < ne; ++e) t.emplace_back(first(r, r2, e), 1.0);
    }
    t.emplace_back(y(r2), -1.0);
    add_row("first_route" + sfx, vidx({v, r2}), std::move(t), Sense::le, 0.0);
  }
  for (int r : rv) {
    for (int r2 : rv) {
      if (r2 == r) continue;
      Terms t;
      for (int e = 0; e < ne; ++e) t.emplace_back(mid(r, r2, e), 1.0);
      t.emplace_back(y(r), 1.0);
      t.emplace_back(y(r2), -1.0);
      add_row("transfer_link" + sfx, vidx({v, r, r2}), std::move(t), Sense::le, 1.0);
    }
  }
  for (int r : rv) {
    for (int r2 : rv) {
      if (r2 <= r) continue;
      for (int e = 0; e < ne; ++e) {
        add_row("transfer_symmetry" + sfx, vidx({v, r, r2, e}), {{mid(r, r2, e), 1.0}, {mid(r2, r, e), -1.0}},
                Sense::eq, 0.0);
      }
    }
  }
  Terms tree;
  for (int r : rv) {
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) {
        tree.emplace_back(first(r, r2, e), 1.0);
        if (r2 != r) tree.emplace_back(mid(r, r2, e), 0.5);
      }
    }
    tree.emplace_back(y(r), -1.0);
  }
  add_row("transfer_tree" + sfx, vidx({v}), std::move(tree), Sense::eq, 0.0);
}

void Builder::boundary_rows(int v, int s) {
  const auto& rv = m_.routes_of_ship[v];
  const int ne = num_speeds(v);
  Terms start;
  for (int r2 : rv) {
    Terms deg;
    for (int r : rv) {
      for (int e = 0; e < ne; ++e) deg.emplace_back(at(var::y11(v, r, r2, e)), 1.0);
    }
    for (int r3 : rv) {
      if (r3 == r2) continue;
      for (int e = 0; e < ne; ++e) deg.emplace_back(at(var::y12(v, r2, r3, e)), 1.0);
    }
    const int y20 = at(var::y2_0(v, r2, s));
    Terms upper = deg;
    upper.emplace_back(y20, 1.0);
    add_row("stage_boundary_upper", {v, r2, s}, std::move(upper), Sense::le, 2.0);
    Terms lower;
    for (const auto& [p, a] : deg) lower.emplace_back(p, -a);
    lower.emplace_back(y20, 1.0);
    add_row("stage_boundary_lower", {v, r2, s}, std::move(lower), Sense::le, 0.0);
    start.emplace_back(y20, 1.0);
  }
  add_row("stage_start", {v, s}, std::move(start), Sense::eq, 1.0);
}

void Builder::time_rows(int v, int s) {
  const bool p1 = s < 0;
  const auto& rv = m_.routes_of_ship[v];
  const int ne = num_speeds(v);
  Terms t;
  for (int r : rv) {
    for (int e = 0; e < ne; ++e) {
      t.emplace_back(at(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s)), inst_.voyage(v, r, e).round_trip_days);
    }
  }
  for (int r : rv) {
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) {
        const double days = inst_.transfer(v, r, r2, e).transfer_days;
        t.emplace_back(at(p1 ? var::y11(v, r, r2, e) : var::y21(v, r, r2, e, s)), days);
        if (r2 != r) t.emplace_back(at(p1 ? var::y12(v, r, r2, e) : var::y22(v, r, r2, e, s)), 0.5 * days);
      }
    }
  }
  t.emplace_back(at(p1 ? var::t_ballast_p1(v) : var::t_ballast_p2(v, s)), 1.0);
  t.emplace_back(at(p1 ? var::t_port_p1(v) : var::t_port_p2(v, s)), 1.0);
  if (p1) {
    add_row("time_budget_p1", {v}, std::move(t), Sense::eq, inst_.ships[v].available_days_p1);
  } else {
    add_row("time_budget_p2", {v, s}, std::move(t), Sense::eq, inst_.ships[v].available_days_p2);
  }
}

void Builder::contract_rows() {
  const int ns = num_scen();
  for (int stage = 0; stage <= ns; ++stage) {
    const bool p1 = stage == 0;
    const int s = stage - 1;
    for (std::size_t li = 0; li < inst_.lanes.size(); ++li) {
      const int i = static_cast<int>(li);
      for (int c : inst_.lanes[i].contracts_served) {
        const auto& con = inst_.contracts[c];
        Terms f;
        for (int v : m_.ships_of_lane[i]) {
          for (int r : m_.lane_routes[i][v]) {
            for (int e = 0; e < num_speeds(v); ++e) {
              f.emplace_back(at(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s)), 1.0);
            }
          }
        }
        if (p1) {
          add_row("contract_frequency_p1", {i, c}, std::move(f), Sense::ge, con.frequency_p1);
        } else {
          add_row("contract_frequency_p2", {i, c, s}, std::move(f), Sense::ge, con.frequency_p2);
        }
        Terms d;
        for (int v : m_.ships_of_lane[i]) {
          for (int k : con.compatible_capacity_types) {
            d.emplace_back(at(p1 ? var::qC_p1(v, i, k, c) : var::qC_p2(v, i, k, c, s)), 1.0);
          }
        }
        if (p1) {
          add_row("contract_demand_p1", {i, c}, std::move(d), Sense::eq, con.demand_p1);
        } else {
          add_row("contract_demand_p2", {i, c, s}, std::move(d), Sense::eq, scen_.scenarios[s].demand_p2[c]);
        }
      }
    }
  }
}

void Builder::capacity_rows() {
  const int ns = num_scen();
  for (int stage = 0; stage <= ns; ++stage) {
    const bool p1 = stage == 0;
    const int s = stage - 1;
    for (std::size_t li = 0; li < inst_.lanes.size(); ++li) {
      const int i = static_cast<int>(li);
      const auto& lane = inst_.lanes[i];
      for (int v : m_.ships_of_lane[i]) {
        for (int k = 0; k < inst_.num_types(); ++k) {
          Terms t;
          const double q = inst_.ships[v].capacity_by_type[k];
          for (int r : m_.lane_routes[i][v]) {
            for (int e = 0; e < num_speeds(v); ++e) {
              t.emplace_back(at(p1 ? var::x_p1(v, r, e) : var::x_p2(v, r, e, s)), q);
            }
          }
          for (int c : lane.contracts_served) {
            const int pos = m_.find(p1 ? var::qC_p1(v, i, k, c) : var::qC_p2(v, i, k, c, s));
            if (pos >= 0) t.emplace_back(pos, -1.0);
          }
          t.emplace_back(at(p1 ? var::qSP_p1(v, i, k) : var::qSP_p2(v, i, k, s)), -1.0);
          if (p1) {
            add_row("capacity_p1", {v, i, k}, std::move(t), Sense::ge, 0.0);
          } else {
            add_row("capacity_p2", {v, i, k, s}, std::move(t), Sense::ge, 0.0);
          }
        }
      }
      for (int k = 0; k < inst_.num_types(); ++k) {
        Terms t;
        for (int v : m_.ships_of_lane[i]) t.emplace_back(at(p1 ? var::qSP_p1(v, i, k) : var::qSP_p2(v, i, k, s)), 1.0);
        if (p1) {
          add_row("spot_limit_p1", {i, k}, std::move(t), Sense::le, lane.spot_volume_p1_by_type[k]);
        } else {
          add_row("spot_limit_p2", {i, k, s}, std::move(t), Sense::le, scen_.scenarios[s].spot_volume_p2[i][k]);
        }
      }
    }
  }
}

void Builder::cii_rows(int v, int s) {
  const auto& ship = inst_.ships[v];
  const auto& rv = m_.routes_of_ship[v];
  const int ne = num_speeds(v);
  const double cii = ship.cii_standard;
  Terms t;
  // Numerator: annual emissions over both stages.
  for (int r : rv) {
    for (int e = 0; e < ne; ++e) {
      const double em = inst_.voyage(v, r, e).round_trip_emissions;
      t.emplace_back(at(var::x_p1(v, r, e)), em);
      t.emplace_back(at(var::x_p2(v, r, e, s)), em);
    }
  }
  for (int r : rv) {
    for (int r2 : rv) {
      for (int e = 0; e < ne; ++e) {
        const double em = inst_.transfer(v, r, r2, e).transfer_emissions;
        t.emplace_back(at(var::y11(v, r, r2, e)), em);
        t.emplace_back(at(var::y21(v, r, r2, e, s)), em);
        if (r2 != r) {
          t.emplace_back(at(var::y12(v, r, r2, e)), 0.5 * em);
          t.emplace_back(at(var::y22(v, r, r2, e, s)), 0.5 * em);
        }
      }
    }
  }
  t.emplace_back(at(var::t_ballast_p1(v)), ship.ballast_emission_rate);
  t.emplace_back(at(var::t_ballast_p2(v, s)), ship.ballast_emission_rate);
  t.emplace_back(at(var::t_port_p1(v)), ship.port_emission_rate);
  t.emplace_back(at(var::t_port_p2(v, s)), ship.port_emission_rate);

  std::string family;
  if (m_.mode == CiiMode::demand_based) {
    family = "cii_demand";
    for (std::size_t li = 0; li < inst_.lanes.size(); ++li) {
      const int i = static_cast<int>(li);
      if (!std::binary_search(m_.ships_of_lane[i].begin(), m_.ships_of_lane[i].end(), v)) continue;
      const double w = cii * inst_.lanes[i].laden_distance;
      for (int k = 0; k < inst_.num_types(); ++k) {
        for (int c : inst_.lanes[i].contracts_served) {
          const int p1 = m_.find(var::qC_p1(v, i, k, c));
          if (p1 < 0) continue;
          t.emplace_back(p1, -w);
          t.emplace_back(at(var::qC_p2(v, i, k, c, s)), -w);
        }
        t.emplace_back(at(var::qSP_p1(v, i, k)), -w);
        t.emplace_back(at(var::qSP_p2(v, i, k, s)), -w);
      }
    }
  } else {
    family = "cii_supply";
    const double cap = cii * ship.total_capacity();
    for (int r : rv) {
      const double len = inst_.routes[r].total_length;
      for (int e = 0; e < ne; ++e) {
        t.emplace_back(at(var::x_p1(v, r, e)), -cap * len);
        t.emplace_back(at(var::x_p2(v, r, e, s)), -cap * len);
      }
    }
    for (int r : rv) {
      for (int r2 : rv) {
        if (r2 == r) continue;
        for (int e = 0; e < ne; ++e) {
          const double len = inst_.transfer(v, r, r2, e).transfer_distance;
          t.emplace_back(at(var::y11(v, r, r2, e)), -cap * len);
          t.emplace_back(at(var::y21(v, r, r2, e, s)), -cap * len);
          t.emplace_back(at(var::y12(v, r, r2, e)), -0.5 * cap * len);
          t.emplace_back(at(var::y22(v, r, r2, e, s)), -0.5 * cap * len);
        }
      }
    }
    t.emplace_back(at(var::t_ballast_p1(v)), -cap * ship.ballast_distance_per_day);
    t.emplace_back(at(var::t_ballast_p2(v, s)), -cap * ship.ballast_distance_per_day);
  }
  if (m_.options.elastic_cii) t.emplace_back(at(var::cii_slack(v, s)), -1e6);
  add_row(family, {v, s}, std::move(t), Sense::le, cii * ship.prior_work - ship.prior_emissions);
}

void Builder::run() {
  index_sets();
  variables();
  const int nv = static_cast<int>(inst_.ships.size());
  const int ns = num_scen();
  for (int v = 0; v < nv; ++v) routing_rows(v, -1);
  for (int s = 0; s < ns; ++s) {
    for (int v = 0; v < nv; ++v) boundary_rows(v, s);
  }
  for (int s = 0; s < ns; ++s) {
    for (int v = 0; v < nv; ++v) routing_rows(v, s);
  }
  for (int v = 0; v < nv; ++v) time_rows(v, -1);
  for (int s = 0; s < ns; ++s) {
    for (int v = 0; v < nv; ++v) time_rows(v, s);
  }
  contract_rows();
  capacity_rows();
  if (m_.mode != CiiMode::none) {
    for (int s = 0; s < ns; ++s) {
      for (int v = 0; v < nv; ++v) cii_rows(v, s);
    }
  }
}

}  // namespace

ModelSpec build_two_stage_model(std::shared_ptr<const InstanceData> instance,
                                std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                const ModelOptions& options) {
  if (!instance || !scenarios) throw std::invalid_argument("build_two_stage_model: null input");
  const auto problems = check_scenarios(*instance, *scenarios);
  if (!problems.empty()) {
    throw std::invalid_argument("scenario set does not match instance: " + problems.front());
  }
  for (const auto& ship : instance->ships) {
    const auto& rv = ship.sailable_routes;
    if (std::find(rv.begin(), rv.end(), ship.initial_route) == rv.end()) {
      throw std::invalid_argument("ship " + std::to_string(ship.id) + ": initial route is not sailable");
    }
  }
  ModelSpec m;
  m.instance = std::move(instance);
  m.scenarios = std::move(scenarios);
  m.mode = mode;
  m.options = options;
  Builder(m).run();
  return m;
}

MilpProblem to_milp(const ModelSpec& model) {
  MilpProblem p;
  for (const auto& mv : model.variables) {
    p.add_col(mv.objective(), mv.lb, mv.ub, mv.domain != Domain::continuous, mv.ref.name());
  }
  for (const auto& c : model.constraints) {
    const double lb = c.sense == Sense::le ? -kInf : c.rhs;
    const double ub = c.sense == Sense::ge ? kInf : c.rhs;
    p.add_row(c.terms, lb, ub, c.name());
  }
  return p;
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_terms(std::ostringstream& os, const ModelSpec& model, const std::vector<std::pair<int, double>>& terms) {
  int col = 0;
  bool first = true;
  for (const auto& [p, a] : terms) {
    std::string piece = (a < 0.0 ? "- " : (first ? "" : "+ ")) + fmt_num(std::abs(a)) + " " +
                        model.variables[p].ref.name();
    if (col > 0 && col + piece.size() > 200) {
      os << "\n   ";
      col = 3;
    }
    os << ' ' << piece;
    col += static_cast<int>(piece.size()) + 1;
    first = false;
  }
  if (terms.empty()) os << " 0 " << model.variables.front().ref.name();
}

}  // namespace

std::string write_lp(const ModelSpec& model) {
  std::ostringstream os;
  os << "\\* two-stage tramp deployment, cii mode " << to_string(model.mode) << " *\\\n";
  os << "Minimize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < static_cast<int>(model.variables.size()); ++j) {
    if (model.variables[j].objective() != 0.0) obj.emplace_back(j, model.variables[j].objective());
  }
  write_terms(os, model, obj);
  os << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    os << ' ' << c.name() << ':';
    write_terms(os, model, c.terms);
    os << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ") << fmt_num(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& mv : model.variables) {
    if (mv.domain == Domain::binary) continue;
    os << ' ' << fmt_num(mv.lb) << " <= " << mv.ref.name() << " <= ";
    if (std::isfinite(mv.ub)) {
      os << fmt_num(mv.ub);
    } else {
      os << "+inf";
    }
    os << '\n';
  }
  os << "Generals\n";
  for (const auto& mv : model.variables) {
    if (mv.domain == Domain::integer) os << ' ' << mv.ref.name() << '\n';
  }
  os << "Binaries\n";
  for (const auto& mv : model.variables) {
    if (mv.domain == Domain::binary) os << ' ' << mv.ref.name() << '\n';
  }
  os << "End\n";
  return os.str();
}

DeploymentPlan plan_from_solution(const ModelSpec& model, const std::vector<double>& x) {
  if (x.size() != model.variables.size()) throw std::invalid_argument("plan_from_solution: size mismatch");
  DeploymentPlan plan;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double value = x[j];
    if (model.variables[j].domain != Domain::continuous) value = std::round(value);
    if (value == 0.0) value = 0.0;
    plan.values.emplace(model.variables[j].ref, value);
  }
  return plan;
}

std::vector<double> solution_from_plan(const ModelSpec& model, const DeploymentPlan& plan) {
  std::vector<double> x(model.variables.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = plan.get(model.variables[j].ref);
  return x;
}

void fix_first_stage(ModelSpec& model, const DeploymentPlan& plan) {
  for (auto& mv : model.variables) {
    if (!is_first_stage(mv.ref.kind)) continue;
    const double v = plan.get(mv.ref);
    mv.lb = v;
    mv.ub = v;
  }
}

}  // namespace tramp
