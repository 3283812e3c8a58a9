#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tramp/model.hpp"

namespace tramp {

enum class Engine { builtin_bnb, external };

const char* to_string(Engine e);
/// Accepts "builtin", "builtin_bnb" and "external".
Engine engine_from_string(const std::string& s);

struct SolveResult;

struct SolverOptions {
  Engine engine = Engine::builtin_bnb;
  double gap = 1e-6;
  double time_limit = 600.0;  // seconds
  int threads = 1;            // forwarded to external engines only
  std::uint64_t seed = 0;
  // External engine command; empty means $TRAMP_EXTERNAL_SOLVER, then the
  // bundled HiGHS adapter script.
  std::string external_command;
  // Called with every result that carries a plan, from the solving thread.
  std::function<void(const SolveResult&, const ModelSpec&)> on_result;
};

/// Throws std::invalid_argument unless gap is in [0,1) and time_limit > 0.
void validate(const SolverOptions& options);

enum class SolveStatus { optimal, feasible, infeasible, time_limit, error };

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::error;
  bool has_plan = false;
  DeploymentPlan plan;
  double objective = 0.0;  // cost - revenue [USD]
  double cost = 0.0;
  double revenue = 0.0;
  double bound = 0.0;
  double wall_time = 0.0;
  int routes_considered = 0;
  long nodes = 0;
  std::vector<std::string> notes;
  // World the plan is indexed against; a heuristic run uses a route-restricted
  // copy of the instance.
  std::shared_ptr<const InstanceData> instance;
  std::shared_ptr<const ScenarioSet> scenarios;
  CiiMode mode = CiiMode::none;
};

SolveResult solve_exact(const ModelSpec& model, const SolverOptions& options = {});

/// Builds the model and solves it exactly.
SolveResult solve_exact(std::shared_ptr<const InstanceData> instance, std::shared_ptr<const ScenarioSet> scenarios,
                        CiiMode mode, const SolverOptions& options = {});

struct HeuristicOptions {
  double threshold = 0.05;
  int max_iteration_times = 3;
  int step_length = 0;  // 0 selects ceil(1.5 N)
};

void validate(const HeuristicOptions& options);
int default_step_length(int num_lanes);

/// Step 2: walks the sorted route list and keeps each route that covers a lane
/// not yet covered, stopping once every lane is covered.  Returns positions in
/// the given list.  Throws naming the first uncovered lane.
std::vector<std::size_t> initial_route_positions(const std::vector<std::vector<int>>& sorted_lane_sets, int num_lanes);

struct HeuristicIteration {
  std::vector<int> routes;  // ids in the full instance
  SolveStatus status = SolveStatus::error;
  double objective = 0.0;
  double wall_time = 0.0;
};

struct HeuristicTrace {
  std::vector<int> sorted_routes;
  std::vector<int> initial_set;
  std::vector<HeuristicIteration> iterations;
};

SolveResult heuristic_route_search(std::shared_ptr<const InstanceData> instance,
                                   std::shared_ptr<const ScenarioSet> scenarios, CiiMode mode,
                                   const HeuristicOptions& h_options = {}, const SolverOptions& s_options = {},
                                   HeuristicTrace* trace = nullptr);

/// (|dcost| + |drevenue|) / (cost_exact + revenue_exact); empty when the
/// denominator is zero.
std::optional<double> normalized_deviation(const SolveResult& heuristic, const SolveResult& exact);
std::optional<double> normalized_deviation(double cost_h, double revenue_h, double cost_e, double revenue_e);

/// |obj_h - obj_e| / |obj_e|, the naive relative error.
std::optional<double> objective_ratio_error(double objective_h, double objective_e);

struct WilcoxonResult {
  double statistic = 0.0;  // W+, sum of ranks of positive differences
  double p_value = 1.0;    // one-sided, H1: median > threshold
  int n = 0;               // nonzero differences
  bool exact = true;
  bool all_zero = false;
};

/// One-sided signed-rank test of H0: median <= threshold.  Zero differences
/// are dropped, ties get average ranks; exact null distribution for n <= 12,
/// normal approximation with tie and continuity correction beyond.
WilcoxonResult wilcoxon_one_sided(const std::vector<double>& deviations, double threshold = 0.05);

}  // namespace tramp
