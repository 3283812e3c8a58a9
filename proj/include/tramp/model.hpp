#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tramp/instance.hpp"
#include "tramp/milp.hpp"
#include "tramp/scenario.hpp"

namespace tramp {

enum class CiiMode { demand_based, supply_based, none };

const char* to_string(CiiMode mode);
/// Accepts "demand", "demand_based", "supply", "supply_based" and "none".
CiiMode cii_mode_from_string(const std::string& s);

enum class VarKind : std::uint8_t {
  x_p1,
  x_p2,
  y1,
  y2,
  y2_0,
  y11,
  y21,
  y12,
  y22,
  qC_p1,
  qC_p2,
  qSP_p1,
  qSP_p2,
  t_ballast_p1,
  t_ballast_p2,
  t_port_p1,
  t_port_p2,
  cii_slack,  // elastic CII slack, only present when ModelOptions::elastic_cii
};

enum class Domain : std::uint8_t { integer, binary, continuous };

const char* to_string(VarKind kind);
Domain domain_of(VarKind kind);
bool is_first_stage(VarKind kind);

/// Variable identity.  Unused indices stay -1; the name lists the used ones in
/// the order v, r, r', e, i, k, c, s.
struct VariableRef {
  VarKind kind = VarKind::x_p1;
  int v = -1;
  int r = -1;
  int r2 = -1;
  int e = -1;
  int i = -1;
  int k = -1;
  int c = -1;
  int s = -1;

  std::string name() const;
  auto operator<=>(const VariableRef&) const = default;
};

namespace var {
VariableRef x_p1(int v, int r, int e);
VariableRef x_p2(int v, int r, int e, int s);
VariableRef y1(int v, int r);
VariableRef y2(int v, int r, int s);
VariableRef y2_0(int v, int r, int s);
VariableRef y11(int v, int r, int r2, int e);
VariableRef y21(int v, int r, int r2, int e, int s);
VariableRef y12(int v, int r, int r2, int e);
VariableRef y22(int v, int r, int r2, int e, int s);
VariableRef qC_p1(int v, int i, int k, int c);
VariableRef qC_p2(int v, int i, int k, int c, int s);
VariableRef qSP_p1(int v, int i, int k);
VariableRef qSP_p2(int v, int i, int k, int s);
VariableRef t_ballast_p1(int v);
VariableRef t_ballast_p2(int v, int s);
VariableRef t_port_p1(int v);
VariableRef t_port_p2(int v, int s);
VariableRef cii_slack(int v, int s);
}  // namespace var

struct ModelVariable {
  VariableRef ref;
  Domain domain = Domain::continuous;
  double lb = 0.0;
  double ub = kInf;
  double cost = 0.0;     // objective cost coefficient, probability weighted [USD]
  double revenue = 0.0;  // objective revenue coefficient [USD]

  double objective() const { return cost - revenue; }
};

enum class Sense { le, eq, ge };

struct ConstraintSpec {
  std::string family;
  std::vector<int> indices;
  std::vector<std::pair<int, double>> terms;  // (variable position, coefficient)
  Sense sense = Sense::le;
  double rhs = 0.0;

  std::string name() const;
};

struct ModelOptions {
  double tolerance = 1e-6;
  // EMS evaluation: CII rows get a nonnegative slack in tonnes CO2 priced at
  // elastic_penalty USD per tonne.
  bool elastic_cii = false;
  double elastic_penalty = 1e9;
};

struct ModelSpec {
  std::shared_ptr<const InstanceData> instance;
  std::shared_ptr<const ScenarioSet> scenarios;
  CiiMode mode = CiiMode::none;
  ModelOptions options;

  std::vector<ModelVariable> variables;
  std::vector<ConstraintSpec> constraints;

  std::vector<double> big_m_p1;  // per ship
  std::vector<double> big_m_p2;

  std::vector<std::vector<int>> routes_of_ship;         // R_v
  std::vector<std::vector<int>> ships_of_lane;          // V_i
  std::vector<std::vector<int>> contracts_of_type;      // C_k^CP
  std::vector<std::vector<std::vector<int>>> lane_routes;  // R_iv as [i][v]

  /// Position of the variable, or -1.
  int find(const VariableRef& ref) const;
  int count(VarKind kind) const;
  int count_family_prefix(const std::string& prefix) const;

  std::map<VariableRef, int> index;
};

ModelSpec build_two_stage_model(std::shared_ptr<const InstanceData> instance,
                                std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                const ModelOptions& options = {});

MilpProblem to_milp(const ModelSpec& model);

/// CPLEX-style LP text; names are written exactly as VariableRef::name and
/// ConstraintSpec::name.
std::string write_lp(const ModelSpec& model);

/// Values keyed by variable; absent variables read as zero.
struct DeploymentPlan {
  std::map<VariableRef, double> values;

  double get(const VariableRef& ref) const;
  void set(const VariableRef& ref, double value);
};

DeploymentPlan plan_from_solution(const ModelSpec& model, const std::vector<double>& x);
std::vector<double> solution_from_plan(const ModelSpec& model, const DeploymentPlan& plan);

/// Clamps the first-stage variables of the model to the values in the plan.
void fix_first_stage(ModelSpec& model, const DeploymentPlan& plan);

struct PlanViolation {
  std::string constraint;
  double residual = 0.0;
};

/// Re-evaluates every constraint family and variable domain from the instance
/// and scenario data and reports residuals above tolerance, scaled by
/// max(1, |rhs|, largest term).
std::vector<PlanViolation> check_plan_feasibility(const DeploymentPlan& plan, const ModelSpec& model,
                                                  double tolerance = 1e-6);

/// Per-ship annual CII terms under scenario s.  Work terms exclude the prior
/// W_v^0.  The chain demand_work <= max_load_work <= capacity_laden_work <=
/// capacity_total_work holds for every plan that respects capacity.
struct CiiBreakdown {
  double emissions = 0.0;            // includes E_v^0 [g]
  double prior_work = 0.0;           // W_v^0
  double demand_work = 0.0;          // sum_i L_i q_i
  double max_load_work = 0.0;        // max average load times laden distance
  double capacity_laden_work = 0.0;  // C times laden distance
  double capacity_total_work = 0.0;  // C times total distance
  double laden_distance = 0.0;
  double total_distance = 0.0;
  std::optional<double> demand_cii;  // empty when the denominator is zero
  std::optional<double> supply_cii;
};

CiiBreakdown cii_breakdown(const DeploymentPlan& plan, const InstanceData& instance, int ship, int scenario);

/// CII of every ship in g/(t*nmile) under the given mode (none reads as
/// supply); empty entries flag a zero denominator.
std::vector<std::optional<double>> cii_value(const DeploymentPlan& plan, const InstanceData& instance,
                                             CiiMode mode, int scenario);

}  // namespace tramp
